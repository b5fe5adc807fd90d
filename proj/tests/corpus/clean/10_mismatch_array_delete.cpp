void reset(int n) {
  double* values = new double[n];
  for (int i = 0; i < n; i++) values[i] = 0.0;
  delete[] values;
}
