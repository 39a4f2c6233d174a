#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace tablabel {

struct Dialect {
  char delimiter = ',';
  bool has_header = true;
};

// Thrown on malformed input; `row` is the 1-based physical record number.
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, size_t row) : std::runtime_error(what), row_(row) {}
  size_t row() const { return row_; }

 private:
  size_t row_;
};

// RFC-4180-style reader: quoted fields may contain delimiters, doubled
// quotes and embedded line breaks. All records must have equal arity.
std::vector<std::vector<std::string>> read_csv(std::istream& in, char delimiter);

void write_csv(std::ostream& out, const std::vector<std::vector<std::string>>& rows,
               char delimiter);

}  // namespace tablabel
