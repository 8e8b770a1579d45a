#include "report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <unistd.h>

namespace report {

json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

json complex(heun::cplx z) { return json{{"re", number(z.real())}, {"im", number(z.imag())}}; }

json reals(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

json complexes(const heun::CVector& v) {
    json out = json::array();
    for (const auto& z : v) out.push_back(complex(z));
    return out;
}

json residual(double r) { return r < 0.0 ? json(nullptr) : number(r); }

void CheckList::add(std::string name, double observed, double tolerance, bool diagnostic) {
    checks_.push_back({std::move(name), observed, tolerance, diagnostic});
}

bool CheckList::all_passed() const {
    for (const auto& c : checks_)
        if (!c.passed()) return false;
    return true;
}

json CheckList::to_json() const {
    json out = json::array();
    for (const auto& c : checks_)
        out.push_back({{"name", c.name},
                       {"observed", number(c.observed)},
                       {"tolerance", number(c.tolerance)},
                       {"diagnostic", c.diagnostic},
                       {"passed", c.passed()}});
    return out;
}

std::string format_double(double x) {
    if (!std::isfinite(x)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string Table::to_csv() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

void write_atomic(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f << content;
        if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, target);
}

}  // namespace report
