#include "synthlab/time.hpp"

#include <cstdio>
#include <memory>
#include <stdexcept>

namespace synthlab {

namespace {

int read_digits(std::string_view text, std::size_t& pos, std::size_t count) {
    if (pos + count > text.size()) {
        throw std::invalid_argument("timestamp too short: " + std::string(text));
    }
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
        char c = text[pos + i];
        if (c < '0' || c > '9') {
            throw std::invalid_argument("bad digit in timestamp: " + std::string(text));
        }
        value = value * 10 + (c - '0');
    }
    pos += count;
    return value;
}

void expect(std::string_view text, std::size_t& pos, char c) {
    if (pos >= text.size() || text[pos] != c) {
        throw std::invalid_argument("malformed timestamp: " + std::string(text));
    }
    ++pos;
}

}  // namespace

Clock system_clock() {
    return [] {
        return std::chrono::time_point_cast<std::chrono::microseconds>(std::chrono::system_clock::now());
    };
}

Clock stepping_clock(Timestamp start, std::chrono::microseconds step) {
    auto next = std::make_shared<Timestamp>(start);
    return [next, step] {
        Timestamp now = *next;
        *next += step;
        return now;
    };
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    auto day = floor<days>(t);
    year_month_day ymd{day};
    hh_mm_ss<microseconds> tod{t - day};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%06lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(tod.hours().count()),
                  static_cast<int>(tod.minutes().count()), static_cast<int>(tod.seconds().count()),
                  static_cast<long long>(tod.subseconds().count()));
    return buf;
}

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    std::size_t pos = 0;
    int y = read_digits(text, pos, 4);
    expect(text, pos, '-');
    int mo = read_digits(text, pos, 2);
    expect(text, pos, '-');
    int d = read_digits(text, pos, 2);
    if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ')) {
        throw std::invalid_argument("malformed timestamp: " + std::string(text));
    }
    ++pos;
    int h = read_digits(text, pos, 2);
    expect(text, pos, ':');
    int mi = read_digits(text, pos, 2);
    expect(text, pos, ':');
    int s = read_digits(text, pos, 2);

    long long micros = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        int digits = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            if (digits < 6) {
                micros = micros * 10 + (text[pos] - '0');
            }
            ++digits;
            ++pos;
        }
        if (digits == 0) {
            throw std::invalid_argument("empty fraction in timestamp: " + std::string(text));
        }
        for (int i = digits; i < 6; ++i) micros *= 10;
    }

    minutes offset{0};
    if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
        ++pos;
    } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        int sign = text[pos] == '-' ? -1 : 1;
        ++pos;
        int oh = read_digits(text, pos, 2);
        if (pos < text.size() && text[pos] == ':') ++pos;
        int om = read_digits(text, pos, 2);
        offset = minutes{sign * (oh * 60 + om)};
    } else {
        throw std::invalid_argument("timestamp lacks zone designator: " + std::string(text));
    }
    if (pos != text.size()) {
        throw std::invalid_argument("trailing characters in timestamp: " + std::string(text));
    }

    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
        throw std::invalid_argument("out-of-range timestamp: " + std::string(text));
    }
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + microseconds{micros} - offset;
}

}  // namespace synthlab
