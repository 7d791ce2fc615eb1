/* Minimal consumer of the acumen C interface.
 *
 * Build against the static library:
 *   cargo build -p acumen-ffi
 *   cc -std=c11 -Wall -I crates/acumen-ffi/include crates/acumen-ffi/examples/demo.c \
 *      target/debug/libacumen_ffi.a -lssl -lcrypto -lpthread -lm -ldl -o demo
 *
 * or against the shared library:
 *   cc -std=c11 -Wall -I crates/acumen-ffi/include crates/acumen-ffi/examples/demo.c \
 *      -L target/debug -lacumen_ffi -Wl,-rpath,target/debug -o demo
 */
#include <stdio.h>
#include <stdlib.h>
#include <math.h>
#include "acumen.h"

static void fail(const char *what) {
    fprintf(stderr, "%s: %s\n", what, acumen_last_error_message());
    exit(1);
}

int main(int argc, char **argv) {
    printf("acumen %s\n", acumen_version());

    double recall = 0, precision = 0, f1 = 0;
    AcumenStatus st = acumen_rouge(
        "the committee approved the budget on friday",
        "the committee approved a budget",
        ACUMEN_ROUGE_VARIANT_ROUGE1, false, &recall, &precision, &f1);
    if (st != ACUMEN_STATUS_OK) fail("rouge");
    printf("rouge1 recall=%.4f precision=%.4f f1=%.4f\n", recall, precision, f1);

    /* Four rating units, flattened: sizes say where each unit ends. */
    double ratings[] = {1, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0};
    size_t sizes[] = {3, 3, 2, 3};
    double alpha = NAN;
    st = acumen_krippendorff(ratings, sizes, 4, ACUMEN_SCALE_NOMINAL, &alpha);
    if (st != ACUMEN_STATUS_OK) fail("krippendorff");
    printf("krippendorff alpha=%.4f\n", alpha);

    double a[] = {0.61, 0.64, 0.62, 0.66, 0.63, 0.65, 0.60, 0.67};
    double b[] = {0.41, 0.44, 0.42, 0.46, 0.43, 0.45, 0.40, 0.47};
    double p = NAN;
    st = acumen_paired_bootstrap(a, b, 8, 11, 1000, &p);
    if (st != ACUMEN_STATUS_OK) fail("paired bootstrap");
    printf("p(a beats b is luck)=%.4f\n", p);

    /* Pass a benchmark directory to score its unit-match annotations. */
    if (argc > 1) {
        AcumenCorpus *corpus = NULL;
        if (acumen_corpus_load(argv[1], &corpus) != ACUMEN_STATUS_OK) fail("corpus load");
        size_t n_examples = 0, n_systems = 0;
        acumen_corpus_counts(corpus, &n_examples, &n_systems);
        printf("corpus: %zu examples, %zu systems\n", n_examples, n_systems);

        AcumenMatrix *scores = NULL;
        if (acumen_acu_scores_raw(corpus, &scores) != ACUMEN_STATUS_OK) fail("scoring");
        size_t rows = 0, cols = 0;
        acumen_matrix_shape(scores, &rows, &cols);
        for (size_t col = 0; col < cols; col++) {
            char *name = NULL;
            if (acumen_matrix_system_name(scores, col, &name) != ACUMEN_STATUS_OK) fail("name");
            double total = 0;
            for (size_t row = 0; row < rows; row++) {
                double value = 0;
                acumen_matrix_get(scores, row, col, &value);
                total += value;
            }
            printf("  %-20s mean score %.4f\n", name, total / (double)rows);
            acumen_string_free(name);
        }
        acumen_matrix_free(scores);
        acumen_corpus_free(corpus);
    }
    return 0;
}
