#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "heun/linalg.hpp"

namespace report {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "heun-bethe/1";

json number(double x);  // null when not finite
json complex(heun::cplx z);
json reals(const std::vector<double>& v);
json complexes(const heun::CVector& v);
// residual that may be unavailable (negative marks "not evaluated")
json residual(double r);

struct Check {
    std::string name;
    double observed = 0.0;
    double tolerance = 0.0;
    bool diagnostic = false;
    bool passed() const { return diagnostic || observed < tolerance; }
};

class CheckList {
public:
    void add(std::string name, double observed, double tolerance, bool diagnostic = false);
    bool all_passed() const;
    json to_json() const;
    const std::vector<Check>& items() const { return checks_; }

private:
    std::vector<Check> checks_;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string to_csv() const;
};

std::string format_double(double x);  // shortest round-trip text, "nan" for non-finite

// write to path through a temporary file and rename; "-" writes to stdout
void write_atomic(const std::string& path, const std::string& content);

}  // namespace report
