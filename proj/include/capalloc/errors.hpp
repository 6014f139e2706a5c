#ifndef CAPALLOC_ERRORS_HPP
#define CAPALLOC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace capalloc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DisjointSupports : Error {
    DisjointSupports() : Error("reweighting vectors have disjoint supports") {}
};

struct IndexMismatch : Error {
    using Error::Error;
};

struct TooLarge : Error {
    using Error::Error;
};

struct NotATree : Error {
    NotATree() : Error("graph is not acyclic") {}
};

struct NotBipartite : Error {
    NotBipartite() : Error("graph is not 2-colorable") {}
};

struct NoConvergence : Error {
    using Error::Error;
};

struct ZeroMass : Error {
    using Error::Error;
};

struct InconsistentLaws : Error {
    using Error::Error;
};

struct InvalidParams : Error {
    using Error::Error;
};

struct BracketFailure : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

}  // namespace capalloc

#endif
