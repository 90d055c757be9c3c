#include <math.h>
#include <stdio.h>
#include "orbit_smooth.h"

int main(void) {
    OsGroup *g = NULL;
    if (os_group_preset("B2", &g) != OS_STATUS_OK) return 1;
    size_t order = 0, dim = 0;
    os_group_order(g, &order, &dim);
    if (order != 8 || dim != 2) return 2;
    double p[2] = {-1.0, 2.0}, img[2];
    if (os_group_fold(g, p, 2, img, NULL) != OS_STATUS_OK) return 3;
    if (fabs(img[0] - 2.0) > 1e-12 || fabs(img[1] - 1.0) > 1e-12) return 4;
    OsChain *c = NULL;
    if (os_chain_new(g, &c) != OS_STATUS_OK) return 5;
    double h[2];
    if (os_chain_apply_h(c, p, 2, h) != OS_STATUS_OK) return 6;
    if (os_chain_apply_h(c, p, 3, h) != OS_STATUS_DIMENSION_MISMATCH) return 7;
    if (os_last_error_message() == NULL) return 8;
    os_chain_free(c);
    os_group_free(g);
    printf("ok %.17g %.17g\n", h[0], h[1]);
    return 0;
}
