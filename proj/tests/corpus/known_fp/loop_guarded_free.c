#include <stdlib.h>
#include <string.h>

int checksum(const char* src) {
  int sum = 0;
  int i;
  char* buf = malloc(16);  // EXPECT-FP: PathMissingRelease
  strncpy(buf, src, 16);
  for (i = 0; i < 10; i++) {
    sum += buf[i];
    if (i == 9) {
      free(buf);
      break;
    }
  }
  return sum;
}
