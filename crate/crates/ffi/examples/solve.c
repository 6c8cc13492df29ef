/* Build: cargo build -p xtfc-ffi
 *        cc -Icrates/ffi/include crates/ffi/examples/solve.c target/debug/libxtfc_ffi.a -lm -lpthread -ldl */
#include <stdbool.h>
#include <stdio.h>

#include "xtfc.h"

int main(void) {
    XtfcConfig *cfg = NULL;
    if (xtfc_config_new("pde1", 0, &cfg) != XTFC_STATUS_OK) {
        fprintf(stderr, "%s\n", xtfc_last_error());
        return 1;
    }
    size_t points[2] = {20, 20};
    xtfc_config_set_points(cfg, points, 2);
    xtfc_config_set_neurons(cfg, 120);

    XtfcReport *report = NULL;
    if (xtfc_run(cfg, &report) != XTFC_STATUS_OK) {
        fprintf(stderr, "%s\n", xtfc_last_error());
        xtfc_config_free(cfg);
        return 1;
    }
    double err = 0.0;
    bool converged = false;
    xtfc_report_test_max_error(report, &err);
    xtfc_report_converged(report, &converged);
    printf("max test error %.3e, converged %d\n", err, converged);

    char *json = NULL;
    xtfc_report_json(report, &json);
    printf("%s\n", json);
    xtfc_string_free(json);

    xtfc_report_free(report);
    xtfc_config_free(cfg);
    return 0;
}
