class Buffer {
 public:
  Buffer() { data_ = new char[256]; }  // EXPECT-LEAK: CtorDtorMismatch
  ~Buffer() {}
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;

 private:
  char* data_;
};
