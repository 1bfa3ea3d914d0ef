/* The public header must compile and link as plain C. */

#include <stdio.h>
#include <string.h>

#include "hevo/hevo.h"

int main(void) {
  hevo_kernel* k = NULL;
  hevo_certificate* c = NULL;
  char* line = NULL;
  hevo_policy p = hevo_default_policy();
  int ok = 0;

  if (hevo_kernel_parse("kernel v1\nbuiltin identity\n", &k) != HEVO_OK) return 1;
  if (hevo_certify(k, HEVO_METHOD_ROWSUM, NULL, NULL, &p, &c) == HEVO_OK &&
      hevo_certificate_render(c, &line) == HEVO_OK) {
    ok = strcmp(line, "CERTIFIED RowSum norm_bound=1.0 cutoff=256") == 0;
    printf("%s\n", line);
  }
  hevo_string_free(line);
  hevo_certificate_free(c);
  hevo_kernel_free(k);
  return ok ? 0 : 1;
}
