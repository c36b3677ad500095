#ifndef ARGQ_SRC_CORPUS_CSV_HPP
#define ARGQ_SRC_CORPUS_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

namespace argq::corpus::detail {

using Row = std::vector<std::string>;

// RFC 4180 style reader: quoted fields may contain the delimiter, doubled
// quotes and line breaks. Accepts LF and CRLF. Blank lines are skipped.
std::vector<Row> parse_delimited(std::string_view contents, char delimiter);

// Tab if the first line contains one, else comma.
char detect_delimiter(std::string_view contents);

}  // namespace argq::corpus::detail

#endif  // ARGQ_SRC_CORPUS_CSV_HPP
