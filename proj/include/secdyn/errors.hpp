#pragma once

#include <complex>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace secdyn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parse failure; offset is a byte index into the source text.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, const std::string& what)
        : Error("syntax error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnsupportedOperation : public Error {
public:
    using Error::Error;
};

class PoleAt : public Error {
public:
    explicit PoleAt(std::complex<double> z) : Error(describe(z)), z_(z) {}
    std::complex<double> where() const noexcept { return z_; }

private:
    static std::string describe(std::complex<double> z) {
        std::ostringstream os;
        os.precision(17);
        os << "pole at (" << z.real() << ", " << z.imag() << ")";
        return os.str();
    }
    std::complex<double> z_;
};

class NotSimpleRoot : public Error { public: using Error::Error; };
class NoConvergence : public Error { public: using Error::Error; };
class Indeterminate : public Error { public: using Error::Error; };
class ZeroFactor : public Error { public: using Error::Error; };
class ExceptionalRoot : public Error { public: using Error::Error; };
class RadiusNotFound : public Error { public: using Error::Error; };
class OutsideBranchDisk : public Error { public: using Error::Error; };
class OutsideTrap : public Error { public: using Error::Error; };
class NoSeriesConvergence : public Error { public: using Error::Error; };
class NotInBasin : public Error { public: using Error::Error; };
class EstimatorStalled : public Error { public: using Error::Error; };
class NotCubic : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class ComplexSyntax : public Error { public: using Error::Error; };

}  // namespace secdyn
