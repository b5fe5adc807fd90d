struct Point {
  int x;
  int y;
};

int origin_count(int n) {
  Point* pts = new Point[n];
  int c = 0;
  for (int i = 0; i < n; i++) {
    if (pts[i].x == 0) c++;
  }
  delete[] pts;
  return c;
}
