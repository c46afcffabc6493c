#ifndef GRAPHSI_ERRORS_HPP
#define GRAPHSI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace graphsi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: bad JSON, invalid graph, bad weights.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Model/graph width mismatch; the message names the offending layer.
class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

/// The requested computation is too large for the configured limits.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Exact computation requested on a model whose readout is not affine.
class NonlinearReadout : public Error {
 public:
  using Error::Error;
};

}  // namespace graphsi

#endif  // GRAPHSI_ERRORS_HPP
