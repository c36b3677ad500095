#include "argq/textproc.hpp"

namespace argq::textproc {

namespace {

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

}  // namespace

std::vector<char32_t> decode_utf8(std::string_view text, std::vector<std::size_t>* offsets) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  if (offsets) offsets->clear();
  std::size_t i = 0;
  while (i < text.size()) {
    if (offsets) offsets->push_back(i);
    const auto b0 = static_cast<unsigned char>(text[i]);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + static_cast<std::size_t>(len) <= text.size();
    for (int k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + static_cast<std::size_t>(k)]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      i += 1;
    } else {
      out.push_back(cp);
      i += static_cast<std::size_t>(len);
    }
  }
  if (offsets) offsets->push_back(i);
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::size_t scalar_count(std::string_view text) { return decode_utf8(text).size(); }

bool is_letter(char32_t cp) {
  if (cp < 0x80) return in(cp, 'A', 'Z') || in(cp, 'a', 'z');
  if (cp == 0xAA || cp == 0xB5 || cp == 0xBA) return true;
  if (in(cp, 0xC0, 0x24F)) return cp != 0xD7 && cp != 0xF7;
  if (in(cp, 0x250, 0x2AF)) return true;
  if (in(cp, 0x370, 0x3FF)) {
    return cp != 0x375 && cp != 0x37E && cp != 0x384 && cp != 0x385 && cp != 0x387;
  }
  if (in(cp, 0x400, 0x481) || in(cp, 0x48A, 0x52F)) return true;
  if (in(cp, 0x531, 0x556) || in(cp, 0x561, 0x587)) return true;
  if (in(cp, 0x5D0, 0x5EA) || in(cp, 0x620, 0x64A)) return true;
  if (in(cp, 0x1E00, 0x1FFF)) return true;
  if (in(cp, 0x3041, 0x3096) || in(cp, 0x30A1, 0x30FA)) return true;
  if (in(cp, 0x4E00, 0x9FFF) || in(cp, 0xAC00, 0xD7A3)) return true;
  return false;
}

bool is_upper(char32_t cp) {
  if (cp < 0x80) return in(cp, 'A', 'Z');
  if (in(cp, 0xC0, 0xDE)) return cp != 0xD7;
  if (in(cp, 0x100, 0x137)) return cp % 2 == 0;
  if (in(cp, 0x139, 0x148)) return cp % 2 == 1;
  if (in(cp, 0x14A, 0x177)) return cp % 2 == 0;
  if (cp == 0x178) return true;
  if (in(cp, 0x179, 0x17E)) return cp % 2 == 1;
  if (in(cp, 0x391, 0x3A9)) return cp != 0x3A2;
  if (in(cp, 0x400, 0x42F)) return true;
  return false;
}

bool is_lower(char32_t cp) {
  if (cp < 0x80) return in(cp, 'a', 'z');
  return is_letter(cp) && !is_upper(cp) && to_lower(cp) == cp &&
         (in(cp, 0xDF, 0x17F) || in(cp, 0x3AC, 0x3CE) || in(cp, 0x430, 0x45F) ||
          cp == 0xB5);
}

char32_t to_lower(char32_t cp) {
  if (!is_upper(cp)) return cp;
  if (cp < 0x80 || in(cp, 0xC0, 0xDE)) return cp + 0x20;
  if (cp == 0x178) return 0xFF;
  if (in(cp, 0x100, 0x17E)) return cp + 1;
  if (in(cp, 0x391, 0x3A9)) return cp + 0x20;
  if (in(cp, 0x400, 0x40F)) return cp + 0x50;
  if (in(cp, 0x410, 0x42F)) return cp + 0x20;
  return cp;
}

std::string fold_case(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool ascii = true;
  for (char c : text) {
    if (static_cast<unsigned char>(c) >= 0x80) {
      ascii = false;
      break;
    }
  }
  if (ascii) {
    for (char c : text) out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c;
    return out;
  }
  for (char32_t cp : decode_utf8(text)) append_utf8(out, to_lower(cp));
  return out;
}

CharClass classify(char32_t cp) {
  if (in(cp, '0', '9') || in(cp, 0x660, 0x669) || in(cp, 0xFF10, 0xFF19)) {
    return CharClass::digit;
  }
  if (in(cp, 0x09, 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
      in(cp, 0x2000, 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
      cp == 0x205F || cp == 0x3000) {
    return CharClass::whitespace;
  }
  if (is_letter(cp)) return CharClass::letter;
  return CharClass::other;
}

CharCounts classify_chars(std::string_view text) {
  CharCounts counts{};
  for (char32_t cp : decode_utf8(text)) ++counts[static_cast<std::size_t>(classify(cp))];
  return counts;
}

}  // namespace argq::textproc
