#include <stdio.h>
#include <stdlib.h>

int read_header(FILE* f, int verbose) {
  char* line = malloc(128);  // EXPECT-LEAK: PathMissingRelease
  if (fgets(line, 128, f) == NULL) {
    return -1;
  }
  if (verbose) {
    puts(line);
  }
  free(line);
  return 0;
}
