#include "tablabel/csv.hpp"

#include <istream>
#include <ostream>

namespace tablabel {

std::vector<std::vector<std::string>> read_csv(std::istream& in, char delimiter) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // record has content on the current line
  size_t row_number = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    if (!rows.empty() && record.size() != rows.front().size()) {
      throw CsvError("row " + std::to_string(row_number) + " has " +
                         std::to_string(record.size()) + " fields, expected " +
                         std::to_string(rows.front().size()),
                     row_number);
    }
    rows.push_back(std::move(record));
    record.clear();
    field_started = false;
  };

  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
      field_started = true;
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      end_record();
      ++row_number;
    } else if (c == '\n') {
      end_record();
      ++row_number;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) {
    throw CsvError("unterminated quoted field at row " + std::to_string(row_number),
                   row_number);
  }
  // final record without trailing newline
  if (field_started || !field.empty() || !record.empty()) end_record();
  return rows;
}

static bool needs_quoting(const std::string& s, char delimiter) {
  for (char c : s) {
    if (c == delimiter || c == '"' || c == '\n' || c == '\r') return true;
  }
  return false;
}

void write_csv(std::ostream& out, const std::vector<std::vector<std::string>>& rows,
               char delimiter) {
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out.put(delimiter);
      if (needs_quoting(row[i], delimiter)) {
        out.put('"');
        for (char c : row[i]) {
          if (c == '"') out.put('"');
          out.put(c);
        }
        out.put('"');
      } else {
        out << row[i];
      }
    }
    out.put('\n');
  }
}

}  // namespace tablabel
