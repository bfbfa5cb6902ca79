#include <math.h>
#include <stdio.h>
#include <string.h>

#include "pqbern.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    double v = 0.0;
    CHECK(pqb_pq_integer(3, 1.0, 0.5, &v) == PQB_STATUS_OK && v == 1.75);
    CHECK(pqb_pq_integer(3, 0.5, 0.9, &v) == PQB_STATUS_INVALID_PAIR);
    CHECK(strstr(pqb_last_error(), "0 < q < p") != NULL);
    CHECK(pqb_pq_binomial(2, 3, 0.9, 0.5, &v) == PQB_STATUS_INDEX_OUT_OF_RANGE);

    double row[9];
    CHECK(pqb_uni_basis_row(8, 0.3, 0.9, 0.6, row, 9) == PQB_STATUS_OK);
    double sum = 0.0;
    for (int k = 0; k < 9; k++) sum += row[k];
    CHECK(fabs(sum - 1.0) < 1e-12);
    CHECK(pqb_uni_basis_row(8, 0.3, 0.9, 0.6, row, 4) == PQB_STATUS_BUFFER_TOO_SMALL);

    PqbFunction *f = NULL;
    CHECK(pqb_function_parse("x^2 + y^2", &f) == PQB_STATUS_OK);
    PqbOperator *op = NULL;
    CHECK(pqb_operator_new(10, 10, 0.9, 0.6, 0.9, 0.6, &op) == PQB_STATUS_OK);
    double e2 = 0.0;
    CHECK(pqb_uni_moment(2, 10, 0.5, 0.9, 0.6, &e2) == PQB_STATUS_OK);
    CHECK(pqb_operator_apply(op, f, 0.5, 0.5, &v) == PQB_STATUS_OK);
    CHECK(fabs(v - 2.0 * e2) < 1e-12);
    CHECK(pqb_operator_apply(op, NULL, 0.5, 0.5, &v) == PQB_STATUS_NULL_POINTER);
    CHECK(pqb_operator_apply(op, f, 1.5, 0.5, &v) == PQB_STATUS_DOMAIN);
    pqb_operator_free(op);
    pqb_function_free(f);

    PqbFunction *bad = NULL;
    CHECK(pqb_function_parse("x + * y", &bad) == PQB_STATUS_PARSE && bad == NULL);
    CHECK(strstr(pqb_last_error(), "byte 4") != NULL);
    printf("ok %s\n", pqb_version());
    return 0;
}
