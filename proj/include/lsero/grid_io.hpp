#pragma once

// ESRI-style ASCII grid reader/writer.
//
//   NCOLS n / NROWS n / XLLCORNER x / YLLCORNER y / CELLSIZE c / NODATA_VALUE v
//   followed by nrows x ncols numbers, north row first.
//
// Keys are read case-insensitively in any order. The writer is canonical:
// uppercase keys, single spaces, shortest round-trip decimals with a ".0"
// suffix on integral reals, so canonical files round-trip byte for byte.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "lsero/error.hpp"
#include "lsero/raster.hpp"

namespace lsero {

/// Shortest decimal that parses back to the same double; integral values get ".0".
inline std::string format_shortest(double v) {
    char buf[64];
    // fixed notation in [1e-4, 1e16), scientific outside; both shortest round-trip
    const double mag = std::abs(v);
    const bool fixed = mag == 0.0 || (mag >= 1e-4 && mag < 1e16);
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, fixed ? std::chars_format::fixed : std::chars_format::scientific);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eni") == std::string::npos) {
        s += ".0";
    }
    return s;
}

namespace detail {

struct Token {
    std::string_view text;
    std::size_t line;
    std::size_t column;
};

class Tokenizer {
public:
    explicit Tokenizer(std::string_view text) : text_{text} {}

    bool next(Token& tok) {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                line_start_ = pos_ + 1;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
        if (pos_ >= text_.size()) {
            return false;
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        tok = Token{text_.substr(start, pos_ - start), line_, start - line_start_ + 1};
        return true;
    }

    std::size_t line() const noexcept { return line_; }

    /// Position of the next unread token, as if it were on the current line.
    std::size_t column() const noexcept { return pos_ - line_start_ + 1; }

    /// True if the remainder of the current line holds only whitespace.
    bool rest_of_line_blank() const {
        for (std::size_t p = pos_; p < text_.size() && text_[p] != '\n'; ++p) {
            if (!std::isspace(static_cast<unsigned char>(text_[p]))) {
                return false;
            }
        }
        return true;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t line_start_ = 0;
};

inline bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

inline std::string upper(std::string_view s) {
    std::string u(s);
    std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return u;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) {
        throw Error("write to '" + path.string() + "' failed");
    }
}

}  // namespace detail

/// Parses grid text. `source` names the input in error messages.
inline Raster parse_grid(std::string_view text, const std::string& source = "<grid>") {
    static constexpr std::string_view kKeys[6] = {"NCOLS", "NROWS", "XLLCORNER", "YLLCORNER", "CELLSIZE",
                                                  "NODATA_VALUE"};
    detail::Tokenizer tz{text};
    GridHeader h;
    bool seen[6] = {};
    double header_vals[6] = {};

    for (int k = 0; k < 6; ++k) {
        detail::Token key;
        if (!tz.next(key)) {
            throw ParseError(source, tz.line(), 1, "unexpected end of file in header");
        }
        const std::string name = detail::upper(key.text);
        const auto it = std::find(std::begin(kKeys), std::end(kKeys), name);
        if (it == std::end(kKeys)) {
            throw ParseError(source, key.line, key.column, "unknown header key '" + std::string(key.text) + "'");
        }
        const auto slot = static_cast<std::size_t>(it - std::begin(kKeys));
        if (seen[slot]) {
            throw ParseError(source, key.line, key.column, "duplicate header key '" + name + "'");
        }
        detail::Token val;
        if (!tz.next(val) || val.line != key.line) {
            throw ParseError(source, key.line, key.column, "header key '" + name + "' has no value");
        }
        double v = 0.0;
        if (!detail::parse_double(val.text, v)) {
            throw ParseError(source, val.line, val.column, "non-numeric value '" + std::string(val.text) + "'");
        }
        if (slot < 2) {
            if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
                throw ParseError(source, val.line, val.column, name + " must be a positive integer");
            }
        } else if (slot == 4 && !(v > 0.0 && std::isfinite(v))) {
            throw ParseError(source, val.line, val.column, "CELLSIZE must be positive");
        }
        seen[slot] = true;
        header_vals[slot] = v;
        if (!tz.rest_of_line_blank()) {
            throw ParseError(source, val.line, tz.column(), "trailing text after header value");
        }
    }

    h.ncols = static_cast<std::size_t>(header_vals[0]);
    h.nrows = static_cast<std::size_t>(header_vals[1]);
    h.xllcorner = header_vals[2];
    h.yllcorner = header_vals[3];
    h.cellsize = header_vals[4];
    h.nodata_value = header_vals[5];

    const std::size_t n = h.size();
    std::vector<double> values(n);
    std::vector<std::uint8_t> mask(n, 1);
    const bool nan_nodata = std::isnan(h.nodata_value);
    detail::Token tok;
    for (std::size_t i = 0; i < n; ++i) {
        if (!tz.next(tok)) {
            throw ParseError(source, tz.line(), 1,
                             "expected " + std::to_string(n) + " cell values, found " + std::to_string(i));
        }
        double v = 0.0;
        if (!detail::parse_double(tok.text, v)) {
            throw ParseError(source, tok.line, tok.column, "non-numeric cell value '" + std::string(tok.text) + "'");
        }
        if (v == h.nodata_value || (nan_nodata && std::isnan(v))) {
            mask[i] = 0;
            v = h.nodata_value;
        }
        values[i] = v;
    }
    if (tz.next(tok)) {
        throw ParseError(source, tok.line, tok.column,
                         "more than " + std::to_string(n) + " cell values (extra token '" + std::string(tok.text) +
                             "')");
    }
    return Raster{h, std::move(values), std::move(mask)};
}

inline Raster read_grid(const std::filesystem::path& path) {
    return parse_grid(detail::read_file(path), path.string());
}

inline std::string format_grid(const Raster& r) {
    const GridHeader& h = r.header();
    std::string out;
    out.reserve(r.size() * 8 + 128);
    out += "NCOLS " + std::to_string(h.ncols) + "\n";
    out += "NROWS " + std::to_string(h.nrows) + "\n";
    out += "XLLCORNER " + format_shortest(h.xllcorner) + "\n";
    out += "YLLCORNER " + format_shortest(h.yllcorner) + "\n";
    out += "CELLSIZE " + format_shortest(h.cellsize) + "\n";
    const std::string nodata = format_shortest(h.nodata_value);
    out += "NODATA_VALUE " + nodata + "\n";
    for (std::size_t row = 0; row < h.nrows; ++row) {
        for (std::size_t col = 0; col < h.ncols; ++col) {
            if (col > 0) {
                out += ' ';
            }
            const std::size_t i = r.index(row, col);
            out += r.valid(i) ? format_shortest(r.value(i)) : nodata;
        }
        out += '\n';
    }
    return out;
}

inline void write_grid(const Raster& r, const std::filesystem::path& path) {
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r.valid(i) && r.value(i) == r.header().nodata_value) {
            throw InvariantError("valid cell " + std::to_string(i) + " equals the nodata value; it would not round-trip");
        }
    }
    detail::write_file(path, format_grid(r));
}

}  // namespace lsero
