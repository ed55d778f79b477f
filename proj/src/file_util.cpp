#include "file_util.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "gridident/errors.hpp"

namespace gridident::detail {

namespace {

class LockedFd {
  public:
    LockedFd(const std::string& path, int flags) : path_(path) {
        fd_ = ::open(path.c_str(), flags | O_CLOEXEC, 0644);
        if (fd_ < 0) {
            throw IoError("cannot open '" + path + "': " + std::strerror(errno));
        }
        if (::flock(fd_, LOCK_EX) != 0) {
            const int err = errno;
            ::close(fd_);
            throw IoError("cannot lock '" + path + "': " + std::strerror(err));
        }
    }
    ~LockedFd() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    LockedFd(const LockedFd&) = delete;
    LockedFd& operator=(const LockedFd&) = delete;

    int fd() const { return fd_; }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    int fd_ = -1;
};

}  // namespace

std::string read_file_locked(const std::string& path) {
    LockedFd f(path, O_RDONLY);
    std::string out;
    char buf[1 << 16];
    for (;;) {
        const ssize_t got = ::read(f.fd(), buf, sizeof buf);
        if (got < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw IoError("read failed on '" + path + "': " + std::strerror(errno));
        }
        if (got == 0) {
            break;
        }
        out.append(buf, static_cast<std::size_t>(got));
    }
    return out;
}

void write_file_locked(const std::string& path, const std::string& contents) {
    // Truncate only after the lock is held.
    LockedFd f(path, O_WRONLY | O_CREAT);
    if (::ftruncate(f.fd(), 0) != 0) {
        throw IoError("cannot truncate '" + path + "': " + std::strerror(errno));
    }
    std::size_t done = 0;
    while (done < contents.size()) {
        const ssize_t put = ::write(f.fd(), contents.data() + done, contents.size() - done);
        if (put < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw IoError("write failed on '" + path + "': " + std::strerror(errno));
        }
        done += static_cast<std::size_t>(put);
    }
}

}  // namespace gridident::detail
