#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dytag/util/error.hpp"

namespace dytag::csv {

/// Streaming RFC-4180 reader: quoted fields may hold the delimiter, doubled
/// quotes and line breaks. Tracks the byte offset at which each record starts
/// so callers can come back to a record with seekg().
class Reader {
public:
    explicit Reader(std::istream& in, char delim = ',') : in_(in), delim_(delim) {}

    /// Reads the next record into `fields`. Returns false at end of input.
    bool next(std::vector<std::string>& fields)
    {
        fields.clear();
        record_offset_ = offset_;
        int c = get();
        if (c == EOF) return false;
        ++records_;

        std::string field;
        bool quoted = false;
        bool field_started_quoted = false;
        for (;; c = get()) {
            if (quoted) {
                if (c == EOF) throw ParseError(records_, "unterminated quoted field");
                if (c == '"') {
                    if (in_.peek() == '"') {
                        get();
                        field.push_back('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    field.push_back(static_cast<char>(c));
                }
                continue;
            }
            if (c == EOF || c == '\n') {
                if (!field_started_quoted && !field.empty() && field.back() == '\r') field.pop_back();
                fields.push_back(std::move(field));
                return true;
            }
            if (c == '\r' && in_.peek() == '\n') continue;
            if (c == delim_) {
                fields.push_back(std::move(field));
                field.clear();
                field_started_quoted = false;
                continue;
            }
            if (c == '"' && field.empty() && !field_started_quoted) {
                quoted = true;
                field_started_quoted = true;
                continue;
            }
            field.push_back(static_cast<char>(c));
        }
    }

    /// Byte offset of the record most recently returned by next().
    std::uint64_t record_offset() const noexcept { return record_offset_; }
    /// Byte offset just past the record most recently returned by next().
    std::uint64_t offset() const noexcept { return offset_; }
    /// Number of physical records consumed, header included.
    std::size_t records() const noexcept { return records_; }

private:
    int get()
    {
        const int c = in_.get();
        if (c != EOF) ++offset_;
        return c;
    }

    std::istream& in_;
    char delim_;
    std::uint64_t offset_ = 0;
    std::uint64_t record_offset_ = 0;
    std::size_t records_ = 0;
};

inline bool needs_quotes(std::string_view s, char delim)
{
    for (char c : s)
        if (c == delim || c == '"' || c == '\n' || c == '\r') return true;
    return false;
}

inline void write_field(std::ostream& out, std::string_view s, char delim, bool force_quotes = false)
{
    if (!force_quotes && !needs_quotes(s, delim)) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

} // namespace dytag::csv
