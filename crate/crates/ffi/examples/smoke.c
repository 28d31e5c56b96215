#include <stdio.h>
#include <stdlib.h>

#include "ccm.h"

static const char *CONFIG =
    "{\"model\": {\"population\": 20, \"properties\": [\"edges\"],"
    " \"distributions\": [{\"kind\": \"poisson\", \"params\": [40]}]},"
    " \"sampler\": {\"burnin\": 5000, \"interval\": 100, \"sample_size\": 200, \"seed\": 1}}";

int main(void) {
    CcmSample *sample = NULL;
    if (ccm_sample_run(CONFIG, NULL, 0, 0, &sample) != CCM_STATUS_OK) {
        fprintf(stderr, "run failed: %s\n", ccm_last_error_message());
        return 1;
    }
    size_t rows = ccm_sample_rows(sample);
    size_t cols = ccm_sample_columns(sample);
    double *stats = malloc(rows * cols * sizeof(double));
    ccm_sample_copy_stats(sample, stats, rows * cols);
    double sum = 0.0;
    for (size_t i = 0; i < rows; i++) {
        sum += stats[i * cols];
    }
    printf("%s rows=%zu mean=%.2f acceptance=%.3f\n", ccm_sample_column_name(sample, 0), rows,
           sum / (double)rows, ccm_sample_acceptance_rate(sample));

    CcmGraph *g = NULL;
    ccm_sample_final_graph(sample, &g);
    printf("final graph: %zu nodes, %zu edges\n", ccm_graph_node_count(g), ccm_graph_edge_count(g));

    char *table = NULL;
    if (ccm_enumerate_json(4, "[\"edges\"]", &table) == CCM_STATUS_OK) {
        printf("%s\n", table);
        ccm_string_free(table);
    }
    if (ccm_enumerate_json(4, "[\"degreedist\"]", &table) != CCM_STATUS_OK) {
        printf("rejected: %s\n", ccm_last_error_message());
    }

    free(stats);
    ccm_graph_free(g);
    ccm_sample_free(sample);
    return 0;
}
