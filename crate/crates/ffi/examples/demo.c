/* Advances the aneurism-at-rest case and prints the largest |A - A0|. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "bloodflow.h"

int main(int argc, char **argv) {
    const char *name = argc > 1 ? argv[1] : "eternal_rest";
    BfSolver *s = NULL;
    if (bf_solver_new(name, 100, BF_MODE_WELL_BALANCED, 0.0, &s) != BF_STATUS_OK) {
        char msg[256];
        bf_last_error(msg, sizeof msg);
        fprintf(stderr, "error: %s\n", msg);
        return 1;
    }
    size_t n = 0;
    bf_solver_n_cells(s, &n);
    if (bf_solver_advance_to(s, 0.01) != BF_STATUS_OK) {
        bf_solver_free(s);
        return 2;
    }
    double *a = malloc(n * sizeof *a), *q = malloc(n * sizeof *q), *a0 = malloc(n * sizeof *a0);
    bf_solver_copy_state(s, a, q, n);
    bf_solver_copy_rest_area(s, a0, n);
    double worst = 0.0;
    for (size_t i = 0; i < n; i++) {
        double d = fabs(a[i] - a0[i]);
        if (d > worst) worst = d;
    }
    double t = 0.0;
    bf_solver_time(s, &t);
    printf("bloodflow %s n=%zu t=%g max|A-A0|=%.3e\n", bf_version(), n, t, worst);
    free(a);
    free(q);
    free(a0);
    bf_solver_free(s);
    return 0;
}
