#include <cstring>

class Blob {
 public:
  Blob() { bytes_ = new unsigned char[64]; }
  Blob(const Blob& other) : bytes_(new unsigned char[64]) {
    std::memcpy(bytes_, other.bytes_, 64);
  }
  Blob& operator=(const Blob&) = delete;
  ~Blob() { delete[] bytes_; }

 private:
  unsigned char* bytes_;
};
