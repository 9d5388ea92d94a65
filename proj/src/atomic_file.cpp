#include "lcurve/atomic_file.hpp"

#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lcurve/error.hpp"

namespace lcurve {

namespace fs = std::filesystem;

void write_file_atomic(const std::string& path, std::string_view contents) {
  const fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  std::string tmpl = (dir / ("." + target.filename().string() + ".tmpXXXXXX")).string();

  const int fd = ::mkstemp(tmpl.data());
  if (fd < 0) throw InputError("cannot create a temporary file next to '" + path + "': " + std::strerror(errno));

  const auto cleanup_and_throw = [&](const std::string& msg) {
    ::close(fd);
    ::unlink(tmpl.c_str());
    throw InputError(msg);
  };
  std::size_t written = 0;
  while (written < contents.size()) {
    const ssize_t n = ::write(fd, contents.data() + written, contents.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      cleanup_and_throw("cannot write '" + path + "': " + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) cleanup_and_throw("cannot flush '" + path + "': " + std::strerror(errno));
  ::fchmod(fd, 0644);
  if (::close(fd) != 0) {
    ::unlink(tmpl.c_str());
    throw InputError("cannot close '" + path + "'");
  }
  if (std::rename(tmpl.c_str(), path.c_str()) != 0) {
    const std::string err = std::strerror(errno);
    ::unlink(tmpl.c_str());
    throw InputError("cannot rename into '" + path + "': " + err);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InputError("cannot read '" + path + "'");
  return ss.str();
}

}  // namespace lcurve
