#include <stdlib.h>
#include <string.h>

int count_words(const char* text) {
  char* copy = malloc(strlen(text) + 1);
  int n = 0;
  strcpy(copy, text);
  for (char* c = copy; *c; c++) {
    if (*c == ' ') n++;
  }
  free(copy);
  return n + 1;
}
