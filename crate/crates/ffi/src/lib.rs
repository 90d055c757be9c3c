//! C interface to `orbit-smooth`.
//!
//! Groups and chains are opaque handles freed with their `_free` function.
//! Every call returns an [`OsStatus`]; the message of the last failure on the
//! calling thread is available from [`os_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use orbit_smooth::smoothing::{eval_h, SmoothChain, SmoothProfile};
use orbit_smooth::{classify, fold, generate_group, preset_group, Chamber, Error, Hyperplane, Point, Preset, ReflectionGroup};

/// Status codes returned by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotFinite = 4,
    Configuration = 5,
    Internal = 6,
    Panic = 7,
}

/// A finite reflection group with its chamber.
pub struct OsGroup {
    group: ReflectionGroup,
    chamber: Chamber,
}

/// A smoothing chain built on a group.
pub struct OsChain {
    chain: SmoothChain,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> OsStatus {
    match err {
        Error::DimensionMismatch { .. } => OsStatus::DimensionMismatch,
        Error::InvalidInput(_) | Error::Parse { .. } => OsStatus::InvalidArgument,
        Error::Configuration(_) | Error::GroupNotFinite { .. } => OsStatus::Configuration,
        Error::InconsistentChamber(_) | Error::Io(_) => OsStatus::Internal,
    }
}

struct Fail(OsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> OsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside orbit-smooth".into());
            OsStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(OsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = std::slice::from_raw_parts(p, len);
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Fail(OsStatus::NotFinite, format!("{what} has a non-finite entry")));
    }
    Ok(s)
}

unsafe fn out_slice<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn build_group(group: ReflectionGroup) -> Result<*mut OsGroup, Fail> {
    let chamber = Chamber::new(&group)?;
    Ok(Box::into_raw(Box::new(OsGroup { group, chamber })))
}

fn check_dim(expected: usize, got: usize) -> Result<(), Fail> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got }.into());
    }
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn os_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Build a preset group by name, for example `"B3"` or `"I2(5)"`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn os_group_preset(name: *const c_char, out: *mut *mut OsGroup) -> OsStatus {
    guard(|| {
        if name.is_null() {
            return Err(null("name"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| Fail(OsStatus::InvalidArgument, "name is not UTF-8".into()))?;
        let preset: Preset = name.parse()?;
        *out = build_group(preset_group(preset)?)?;
        Ok(())
    })
}

/// Generate the group of the reflections with the given mirror normals,
/// stored row-major as `count` rows of `dim` entries.
///
/// # Safety
/// `normals` must hold `count * dim` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn os_group_from_normals(
    normals: *const f64,
    count: usize,
    dim: usize,
    cap: usize,
    out: *mut *mut OsGroup,
) -> OsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if count == 0 || dim == 0 {
            return Err(Fail(OsStatus::InvalidArgument, "need at least one normal of positive dimension".into()));
        }
        let data = slice(normals, count * dim, "normals")?;
        let gens = data.chunks(dim).map(Hyperplane::from_slice).collect::<Result<Vec<_>, _>>()?;
        *out = build_group(generate_group(&gens, cap)?)?;
        Ok(())
    })
}

/// # Safety
/// `group` must come from a constructor here and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn os_group_free(group: *mut OsGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// # Safety
/// `group` must be a live handle; `order` and `dim` may be null.
#[no_mangle]
pub unsafe extern "C" fn os_group_order(group: *const OsGroup, order: *mut usize, dim: *mut usize) -> OsStatus {
    guard(|| {
        let g = group.as_ref().ok_or_else(|| null("group"))?;
        if let Some(o) = order.as_mut() {
            *o = g.group.order();
        }
        if let Some(d) = dim.as_mut() {
            *d = g.group.dimension;
        }
        Ok(())
    })
}

/// Fold `point` into the chamber. `image` receives `dim` values; `steps`
/// (may be null) the number of reflections applied.
///
/// # Safety
/// Both buffers must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn os_group_fold(
    group: *const OsGroup,
    point: *const f64,
    dim: usize,
    image: *mut f64,
    steps: *mut usize,
) -> OsStatus {
    guard(|| {
        let g = group.as_ref().ok_or_else(|| null("group"))?;
        check_dim(g.group.dimension, dim)?;
        let p = Point::from_column_slice(slice(point, dim, "point")?);
        let out = out_slice(image, dim, "image")?;
        let r = fold(&g.group, &g.chamber, &p)?;
        out.copy_from_slice(r.image.as_slice());
        if let Some(s) = steps.as_mut() {
            *s = r.steps;
        }
        Ok(())
    })
}

/// Stratum level of `point` and the number of mirrors through it.
///
/// # Safety
/// `point` must hold `dim` values; `level` and `wall_count` may be null.
#[no_mangle]
pub unsafe extern "C" fn os_group_classify(
    group: *const OsGroup,
    point: *const f64,
    dim: usize,
    tol: f64,
    level: *mut usize,
    wall_count: *mut usize,
) -> OsStatus {
    guard(|| {
        let g = group.as_ref().ok_or_else(|| null("group"))?;
        check_dim(g.group.dimension, dim)?;
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Fail(OsStatus::InvalidArgument, "tolerance must be finite and non-negative".into()));
        }
        let p = Point::from_column_slice(slice(point, dim, "point")?);
        let d = classify(&g.group, &p, tol);
        if let Some(l) = level.as_mut() {
            *l = d.level;
        }
        if let Some(w) = wall_count.as_mut() {
            *w = d.walls_containing.len();
        }
        Ok(())
    })
}

/// Chain with the default profile and tube parameters for `group`.
///
/// # Safety
/// `group` must be a live handle; it is copied and may be freed afterwards.
#[no_mangle]
pub unsafe extern "C" fn os_chain_new(group: *const OsGroup, out: *mut *mut OsChain) -> OsStatus {
    guard(|| {
        let g = group.as_ref().ok_or_else(|| null("group"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let chain = SmoothChain::with_defaults(g.group.clone())?;
        *out = Box::into_raw(Box::new(OsChain { chain }));
        Ok(())
    })
}

/// # Safety
/// `chain` must come from [`os_chain_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn os_chain_free(chain: *mut OsChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

unsafe fn chain_map(
    chain: *const OsChain,
    point: *const f64,
    dim: usize,
    out: *mut f64,
    f: impl FnOnce(&SmoothChain, &Point) -> orbit_smooth::Result<Point>,
) -> OsStatus {
    guard(|| {
        let c = chain.as_ref().ok_or_else(|| null("chain"))?;
        check_dim(c.chain.group.dimension, dim)?;
        let p = Point::from_column_slice(slice(point, dim, "point")?);
        let dst = out_slice(out, dim, "out")?;
        dst.copy_from_slice(f(&c.chain, &p)?.as_slice());
        Ok(())
    })
}

/// The invariant map `H` at `point`.
///
/// # Safety
/// `point` and `out` must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn os_chain_apply_h(chain: *const OsChain, point: *const f64, dim: usize, out: *mut f64) -> OsStatus {
    chain_map(chain, point, dim, out, |c, p| c.apply_H(p))
}

/// The chamber map `G`; `point` must lie in the closed chamber.
///
/// # Safety
/// `point` and `out` must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn os_chain_apply_g(chain: *const OsChain, point: *const f64, dim: usize, out: *mut f64) -> OsStatus {
    chain_map(chain, point, dim, out, |c, p| c.apply_G(p))
}

/// Check that the tubes of the chain are disjoint, sampling
/// `samples_per_face` points of every face.
///
/// # Safety
/// `chain` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn os_chain_validate(chain: *const OsChain, samples_per_face: usize, seed: u64) -> OsStatus {
    guard(|| {
        let c = chain.as_ref().ok_or_else(|| null("chain"))?;
        c.chain.validate_tubes(samples_per_face, seed)?;
        Ok(())
    })
}

/// Derivative of order `order` (0 to 4) of the default profile `h` at `t`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn os_eval_h(t: f64, order: u32, out: *mut f64) -> OsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !t.is_finite() {
            return Err(Fail(OsStatus::NotFinite, "t is not finite".into()));
        }
        *out = eval_h(&SmoothProfile::default(), t, order as usize)?;
        Ok(())
    })
}
