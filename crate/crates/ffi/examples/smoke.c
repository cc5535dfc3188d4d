/* Smoke test for the dplab C ABI.
 *
 * Build from the workspace root (the cdylib must exist first):
 *
 *   cargo build -p dplab-ffi --release
 *   cc crates/ffi/examples/smoke.c -Icrates/ffi/include \
 *      -Ltarget/release -ldplab_ffi -o /tmp/dplab_smoke
 *   LD_LIBRARY_PATH=target/release /tmp/dplab_smoke
 *
 * Exits 0 and prints a few lines when every call behaves.
 */

#include <stdio.h>
#include <stdlib.h>

#include "dplab.h"

static void expect(DplabStatus status, const char *what) {
  if (status != DPLAB_STATUS_OK) {
    fprintf(stderr, "%s failed: %s (%s)\n", what, dplab_status_name(status),
            dplab_last_error_message());
    exit(1);
  }
}

int main(void) {
  printf("abi version: %u\n", dplab_abi_version());

  /* A noiseless tree counter tracks the exact prefix sum. */
  DplabCounter *counter = NULL;
  expect(dplab_counter_new_tree(8, 1.0, 1, 42, &counter), "counter_new_tree");
  double estimate = -1.0;
  const unsigned char bits[8] = {1, 0, 1, 1, 0, 0, 1, 1};
  double exact = 0.0;
  for (int i = 0; i < 8; i++) {
    expect(dplab_counter_step(counter, bits[i], &estimate), "counter_step");
    exact += bits[i];
    if (estimate != exact) {
      fprintf(stderr, "estimate %f != exact %f at step %d\n", estimate, exact, i + 1);
      return 1;
    }
  }
  dplab_counter_free(counter);
  printf("noiseless counter: exact over 8 steps\n");

  /* The exact monitor halts when the third 1 of k=4 arrives. */
  DplabMonitor *monitor = NULL;
  expect(dplab_monitor_new_exact(16, 4, &monitor), "monitor_new_exact");
  unsigned char halt = 0;
  const unsigned char ones[3] = {1, 1, 1};
  for (int i = 0; i < 3; i++) {
    expect(dplab_monitor_step(monitor, ones[i], &halt), "monitor_step");
  }
  if (halt != 1) {
    fprintf(stderr, "exact monitor did not halt at its trigger\n");
    return 1;
  }
  dplab_monitor_free(monitor);
  printf("exact monitor: halted at its trigger\n");

  /* Error paths: a bad parameter surfaces a code and a message. */
  DplabCounter *bad = NULL;
  DplabStatus status = dplab_counter_new_tree(8, -1.0, 0, 0, &bad);
  if (status != DPLAB_STATUS_INVALID_ARGUMENT) {
    fprintf(stderr, "negative eps should be invalid_argument\n");
    return 1;
  }
  printf("error path: %s (%s)\n", dplab_status_name(status),
         dplab_last_error_message());

  /* One-shot analyses. */
  size_t two_l = 0;
  expect(dplab_ladder_two_l(0.6931471805599453, 0.05, &two_l), "ladder_two_l");
  printf("worked ladder rungs: %zu\n", two_l);

  double divergence = 0.0;
  unsigned char pass = 0;
  expect(dplab_jdp_audit(1.0, 0.05, 1, 12, &divergence, NULL, &pass), "jdp_audit");
  printf("audit: max divergence %.6f, pass %u\n", divergence, pass);

  return pass == 1 ? 0 : 1;
}
