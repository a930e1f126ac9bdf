#include <stdio.h>
#include <string.h>

#include "fixfree.h"

static int fail(const char *what) {
  char *msg = ff_last_error();
  fprintf(stderr, "%s: %s\n", what, msg ? msg : "(no message)");
  ff_string_free(msg);
  return 1;
}

int main(void) {
  FfProfile *p = NULL;
  if (ff_profile_parse("q=2 alpha=0,1,2,4", &p) != FF_STATUS_OK) return fail("parse");

  char *kraft = NULL;
  if (ff_profile_kraft(p, &kraft) != FF_STATUS_OK) return fail("kraft");
  printf("kraft=%s\n", kraft);
  ff_string_free(kraft);

  FfVerdict v;
  FfCode *c = NULL;
  if (ff_construct(p, 1000000, &v, &c) != FF_STATUS_OK) return fail("construct");
  bool ok = false, fit = false;
  ff_code_is_fix_free(c, &ok);
  ff_code_fits(c, p, &fit);
  printf("verdict=%d words=%zu fix_free=%d fits=%d\n", (int)v, ff_code_len(c), ok, fit);
  ff_code_free(c);
  ff_profile_free(p);

  if (ff_profile_parse("q=2 alpha=x", &p) != FF_STATUS_PARSE) return fail("bad parse accepted");
  char *msg = ff_last_error();
  printf("error=%s\n", msg ? "set" : "unset");
  ff_string_free(msg);
  return 0;
}
