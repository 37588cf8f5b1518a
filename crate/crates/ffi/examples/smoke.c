/* Build after `cargo build -p bosonlab-ffi --release`:
 *   cc -Icrates/ffi/include crates/ffi/examples/smoke.c \
 *      target/release/libbosonlab_ffi.a -lm -lpthread -ldl -o smoke
 */
#include <math.h>
#include <stdio.h>

#include "bosonlab.h"

int main(void) {
    BlState *rho = NULL, *noisy = NULL;
    double noise = 1.0, dist = 0.0, bound = 0.0;

    if (bl_state_coherent(1.0, 0.0, 60, &rho) != BL_STATUS_OK) {
        fprintf(stderr, "coherent: %s\n", bl_last_error());
        return 1;
    }
    if (bl_apply_agn(rho, &noise, 1, &noisy) != BL_STATUS_OK) {
        fprintf(stderr, "agn: %s\n", bl_last_error());
        return 1;
    }
    bl_trace_distance(rho, noisy, &dist);
    bl_bound_theorem2(noise, &bound);
    printf("bosonlab %s: distance %.9f, bound %.6f\n", bl_version(), dist, bound);

    BlState *bad = NULL;
    BlStatus st = bl_state_number(5, 3, &bad);
    printf("expected failure %d: %s\n", (int)st, bl_last_error());

    BlPowerResult p;
    bl_power_calc(1.0, 1e-6, 1e15, NAN, NAN, &p);
    printf("power %.3f dBm\n", p.power_dbm);

    bl_state_free(noisy);
    bl_state_free(rho);
    return (fabs(dist - 1.0) < 1e-6 && dist <= bound) ? 0 : 1;
}
