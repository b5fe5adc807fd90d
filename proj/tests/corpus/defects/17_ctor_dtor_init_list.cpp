#include <cstdlib>

class Table {
 public:
  explicit Table(int n)
      : rows_((int*)malloc(n * sizeof(int))),  // EXPECT-LEAK: CtorDtorMismatch
        cols_(new int[n]) {}
  ~Table() { delete[] cols_; }
  Table(const Table&) = delete;
  Table& operator=(const Table&) = delete;

 private:
  int* rows_;
  int* cols_;
};
