#include <stdio.h>
#include <string.h>

#include "kinsy.h"

static const char *SCENARIO =
    "dim 2\n"
    "degree 1\n"
    "horizon 2\n"
    "point 0 | 0 1 | 0\n"
    "point 1 | 1 | 1\n"
    "point 2 | 3 -1 | 0\n";

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__,       \
                    __LINE__, #cond, kinsy_last_error());        \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    KinsySimulation *sim = NULL;
    CHECK(kinsy_simulation_new(SCENARIO, KINSY_MODE_ANN, 0.0, 0.0, &sim) == KINSY_STATUS_OK);
    size_t n = 0;
    CHECK(kinsy_simulation_point_count(sim, &n) == KINSY_STATUS_OK && n == 3);
    bool found = false;
    uint64_t q = 0;
    CHECK(kinsy_simulation_nearest(sim, 2, &found, &q) == KINSY_STATUS_OK && found && q == 1);
    CHECK(kinsy_simulation_advance(sim, 5, 4) == KINSY_STATUS_OK);
    CHECK(kinsy_simulation_nearest(sim, 2, &found, &q) == KINSY_STATUS_OK && found && q == 0);
    CHECK(kinsy_simulation_verify(sim) == KINSY_STATUS_OK);
    CHECK(kinsy_simulation_nearest(sim, 9, &found, &q) == KINSY_STATUS_UNKNOWN_POINT);
    CHECK(strlen(kinsy_last_error()) > 0);
    kinsy_simulation_free(sim);
    printf("ok %s\n", kinsy_version());
    return 0;
}
