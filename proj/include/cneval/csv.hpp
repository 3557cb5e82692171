#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace cneval::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line on which the record starts
};

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and line
// breaks. CRLF and LF record terminators are both accepted. Throws
// InputError on an unterminated quote.
std::vector<Row> read(std::istream& in);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

}  // namespace cneval::csv
