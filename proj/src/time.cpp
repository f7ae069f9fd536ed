#include "iwaa/time.hpp"

#include <cctype>
#include <cstdio>

namespace iwaa {
namespace {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

bool all_digits(const std::string& s, size_t pos, size_t n) {
    if (pos + n > s.size()) return false;
    for (size_t i = 0; i < n; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[pos + i]))) return false;
    return true;
}

int num(const std::string& s, size_t pos, size_t n) {
    int v = 0;
    for (size_t i = 0; i < n; ++i) v = v * 10 + (s[pos + i] - '0');
    return v;
}

[[noreturn]] void bad(const std::string& text) {
    throw std::invalid_argument("malformed RFC3339 timestamp: '" + text + "'");
}

}  // namespace

Timestamp parse_rfc3339(const std::string& text) {
    // YYYY-MM-DD T HH:MM:SS [.frac] (Z | +HH:MM | -HH:MM)
    if (text.size() < 20) bad(text);
    if (!all_digits(text, 0, 4) || text[4] != '-' || !all_digits(text, 5, 2) ||
        text[7] != '-' || !all_digits(text, 8, 2))
        bad(text);
    const char sep = text[10];
    if (sep != 'T' && sep != 't' && sep != ' ') bad(text);
    if (!all_digits(text, 11, 2) || text[13] != ':' || !all_digits(text, 14, 2) ||
        text[16] != ':' || !all_digits(text, 17, 2))
        bad(text);

    const int year = num(text, 0, 4);
    const int month = num(text, 5, 2);
    const int day = num(text, 8, 2);
    const int hour = num(text, 11, 2);
    const int minute = num(text, 14, 2);
    const int second = num(text, 17, 2);
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 ||
        minute > 59 || second > 60)
        bad(text);

    size_t pos = 19;
    int64_t frac_us = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) bad(text);
        int64_t scale = 100000;
        for (size_t i = start; i < pos && i < start + 6; ++i) {
            frac_us += (text[i] - '0') * scale;
            scale /= 10;
        }
    }

    if (pos >= text.size()) bad(text);
    int64_t offset_s = 0;
    const char c = text[pos];
    if (c == 'Z' || c == 'z') {
        if (pos + 1 != text.size()) bad(text);
    } else if (c == '+' || c == '-') {
        if (!all_digits(text, pos + 1, 2) || pos + 3 >= text.size() ||
            text[pos + 3] != ':' || !all_digits(text, pos + 4, 2) ||
            pos + 6 != text.size())
            bad(text);
        const int oh = num(text, pos + 1, 2);
        const int om = num(text, pos + 4, 2);
        if (oh > 23 || om > 59) bad(text);
        offset_s = (c == '+' ? 1 : -1) * (oh * 3600 + om * 60);
    } else {
        bad(text);
    }

    const int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                         static_cast<unsigned>(day));
    const int64_t utc_s =
        days * 86400 + hour * 3600 + minute * 60 + second - offset_s;
    return Timestamp{utc_s * 1000000 + frac_us};
}

std::string format_rfc3339(Timestamp t) {
    int64_t s = t.us / 1000000;
    int64_t frac = t.us % 1000000;
    if (frac < 0) {
        frac += 1000000;
        s -= 1;
    }
    int64_t days = s / 86400;
    int64_t sod = s % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    // civil date from day count (inverse of days_from_civil)
    int64_t z = days + 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t y = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    const int64_t year = y + (m <= 2);

    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lld.%06lldZ",
                  static_cast<long long>(year), m, d,
                  static_cast<long long>(sod / 3600),
                  static_cast<long long>((sod % 3600) / 60),
                  static_cast<long long>(sod % 60),
                  static_cast<long long>(frac));
    return buf;
}

}  // namespace iwaa
