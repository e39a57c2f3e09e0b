#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "betreg/hypothesis.hpp"
#include "betreg/synthetic.hpp"

namespace betreg {

// Malformed or unreadable input files. The CLI maps this to exit code 2.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest decimal string that parses back to the same double ('.' decimal
// separator); keeps CSV/JSON output byte-stable and round-trip exact.
std::string format_double(double v);

// Tabulated class file:
// {"support": [[x...],...], "weights": [...], "hypotheses": [[v...],...],
//  "star_index": int|null}
struct TabulatedClassFile {
  FiniteSupport space;
  HypothesisClass hypothesis_class;
};

TabulatedClassFile load_class_file(const std::string& path);
void save_class_file(const std::string& path, const FiniteSupport& space,
                     const HypothesisClass& cls);

// Instance file: the class file plus a "labels" section and the seed.
SyntheticInstance load_instance_file(const std::string& path);
void save_instance_file(const std::string& path, const SyntheticInstance& inst);

// Dataset CSV with header x1,...,xd,y. When `space` is given, each row's
// features are resolved to a support index by exact match; unknown support
// points are an error.
Dataset load_dataset_csv(const std::string& path,
                         const FiniteSupport* space = nullptr);
void save_dataset_csv(const std::string& path, const Dataset& dataset);

}  // namespace betreg
