#include "corpus/csv.hpp"

#include "argq/errors.hpp"

namespace argq::corpus::detail {

char detect_delimiter(std::string_view contents) {
  const auto eol = contents.find('\n');
  const auto header = contents.substr(0, eol);
  return header.find('\t') != std::string_view::npos ? '\t' : ',';
}

std::vector<Row> parse_delimited(std::string_view contents, char delimiter) {
  if (contents.substr(0, 3) == "\xEF\xBB\xBF") contents.remove_prefix(3);

  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.size() == 1 && row.front().empty();
    if (!blank) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < contents.size(); ++i) {
    const char c = contents[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < contents.size() && contents[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r' && i + 1 < contents.size() && contents[i + 1] == '\n') {
      // handled by the '\n'
    } else if (c == '\n') {
      end_row();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field at end of file");
  if (field_started || !row.empty()) end_row();
  return rows;
}

}  // namespace argq::corpus::detail
