#include <math.h>
#include <stdio.h>
#include "grover_cost.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "line %d: %s\n", __LINE__, #cond); return 1; } } while (0)

int main(void) {
    double v = 0.0;
    CHECK(gc_f_upper(4, 1, &v) == GC_STATUS_OK);
    CHECK(fabs(v - 2.0344) < 1e-12);
    CHECK(gc_qmax_loose(100, 1.0, &v) == GC_STATUS_OK);
    CHECK(fabs(v - 66.3253) < 1e-4);
    CHECK(gc_crossover(100, 2.0, &v) == GC_STATUS_NO_VALUE);
    CHECK(gc_f_upper(4, 0, &v) == GC_STATUS_INVALID_ARGUMENT);
    CHECK(gc_last_error_message() != NULL);

    GcInstance *inst = NULL;
    CHECK(gc_instance_generate(40, 2, 3.0, 7, &inst) == GC_STATUS_OK);
    size_t n, m, k;
    CHECK(gc_instance_shape(inst, &n, &m, &k) == GC_STATUS_OK);
    CHECK(n == 40 && m == 120 && k == 2);

    GcLedger *ledger = NULL;
    CHECK(gc_climb(inst, GC_VARIANT_SIMPLE, GC_MODE_QUANTUM_EXACT, 1, 1e-5, 2.0, &ledger) == GC_STATUS_OK);
    GcLedgerSummary s;
    CHECK(gc_ledger_summary(ledger, &s) == GC_STATUS_OK);
    CHECK(s.converged && s.total_quantum > 0.0 && s.final_objective >= s.initial_objective);
    gc_ledger_free(ledger);
    gc_instance_free(inst);
    printf("ok %s\n", gc_version());
    return 0;
}
