class Buffer {
 public:
  Buffer() { data_ = new char[256]; }
  ~Buffer() { delete[] data_; }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;

 private:
  char* data_;
};
