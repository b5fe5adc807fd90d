#include <stdlib.h>

int grow(int n) {
  int* v = malloc(n * sizeof(int));
  int r;
  v = realloc(v, 2 * n * sizeof(int));
  v[0] = n;
  r = v[0];
  free(v);
  return r;
}
