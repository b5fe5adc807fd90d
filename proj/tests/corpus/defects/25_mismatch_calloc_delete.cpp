#include <cstdlib>

int sum_counts(int n) {
  int* counts = (int*)calloc(n, sizeof(int));
  int total = 0;
  for (int i = 0; i < n; i++) {
    counts[i] = i;
    total += counts[i];
  }
  delete[] counts;  // EXPECT-LEAK: MismatchedAllocFree
  return total;
}
