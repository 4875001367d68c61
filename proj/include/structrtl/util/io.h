#ifndef STRUCTRTL_UTIL_IO_H_
#define STRUCTRTL_UTIL_IO_H_

#include <string>

namespace structrtl {

// Whole-file read/write; Error on failure.
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);

}  // namespace structrtl

#endif  // STRUCTRTL_UTIL_IO_H_
