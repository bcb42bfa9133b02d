// LD_PRELOAD library that refuses IP sockets. Any attempt is recorded by
// creating the file named in PDDLKIT_NONET_MARKER, so a parent process can
// tell whether a child tried to reach the network.

#include <dlfcn.h>
#include <errno.h>
#include <fcntl.h>
#include <stdlib.h>
#include <string.h>
#include <sys/socket.h>
#include <unistd.h>

namespace {

void mark(const char* what) {
    const char* path = getenv("PDDLKIT_NONET_MARKER");
    if (!path) return;
    const int fd = open(path, O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) return;
    ssize_t ignored = write(fd, what, strlen(what));
    ignored = write(fd, "\n", 1);
    (void)ignored;
    close(fd);
}

bool is_ip(int domain) { return domain == AF_INET || domain == AF_INET6; }

}  // namespace

extern "C" int socket(int domain, int type, int protocol) {
    using Fn = int (*)(int, int, int);
    static Fn real = reinterpret_cast<Fn>(dlsym(RTLD_NEXT, "socket"));
    if (is_ip(domain)) {
        mark("socket");
        errno = EACCES;
        return -1;
    }
    return real(domain, type, protocol);
}

extern "C" int connect(int fd, const struct sockaddr* addr, socklen_t len) {
    using Fn = int (*)(int, const struct sockaddr*, socklen_t);
    static Fn real = reinterpret_cast<Fn>(dlsym(RTLD_NEXT, "connect"));
    if (addr && is_ip(addr->sa_family)) {
        mark("connect");
        errno = EACCES;
        return -1;
    }
    return real(fd, addr, len);
}
