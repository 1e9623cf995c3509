// config.cpp — Unit-aware INI parsing for scenario files.

#include "eitcool/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eitcool/units.hpp"

namespace eitcool::config {

namespace {

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

// Split "3.4 Gamma" into the numeric part and the unit token.
std::pair<double, std::string> split_quantity(const std::string& text, const std::string& context,
                                              int line) {
    std::istringstream ss(trim(text));
    double value = 0.0;
    if (!(ss >> value)) {
        throw ConfigError(context + ": expected a number, got '" + text + "'", line, context);
    }
    std::string unit;
    ss >> unit;
    std::string rest;
    if (ss >> rest) {
        throw ConfigError(context + ": trailing tokens after unit in '" + text + "'", line,
                          context);
    }
    return {value, unit};
}

} // namespace

double parse_angular_frequency(const std::string& text, double gamma_ref,
                               const std::string& context, int line) {
    const auto [value, unit] = split_quantity(text, context, line);
    if (unit == "GHz") return units::hz(value * 1e9);
    if (unit == "MHz") return units::mhz(value);
    if (unit == "kHz") return units::khz(value);
    if (unit == "Hz") return units::hz(value);
    if (unit == "rad/s") return value;
    if (unit == "Gamma") {
        if (gamma_ref <= 0.0) {
            throw ConfigError(context + ": 'Gamma' units need gamma_total defined first", line,
                              context);
        }
        return value * gamma_ref;
    }
    throw ConfigError(context + ": unknown frequency unit '" + unit +
                          "' (use GHz, MHz, kHz, Hz, rad/s or Gamma)",
                      line, context);
}

double parse_time(const std::string& text, const std::string& context, int line) {
    const auto [value, unit] = split_quantity(text, context, line);
    if (unit == "s") return value;
    if (unit == "ms") return value * 1e-3;
    if (unit == "us") return value * 1e-6;
    if (unit == "ns") return value * 1e-9;
    throw ConfigError(context + ": unknown time unit '" + unit + "' (use s, ms, us or ns)", line,
                      context);
}

double parse_field(const std::string& text, const std::string& context, int line) {
    const auto [value, unit] = split_quantity(text, context, line);
    if (unit == "T") return value;
    if (unit == "mT") return value * 1e-3;
    if (unit == "uT") return value * 1e-6;
    if (unit == "nT") return value * 1e-9;
    throw ConfigError(context + ": unknown field unit '" + unit + "' (use T, mT, uT or nT)", line,
                      context);
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str(), path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
    Config config;
    config.origin_ = origin;
    config.sections_.push_back({"", {}}); // anonymous top-level section

    std::istringstream stream(text);
    std::string raw;
    int line_number = 0;
    Section* current = &config.sections_.front();
    while (std::getline(stream, raw)) {
        ++line_number;
        const auto comment = raw.find('#');
        std::string line = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(origin + ": unterminated section header", line_number, line);
            }
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) {
                throw ConfigError(origin + ": empty section name", line_number, line);
            }
            if (config.find_section(name)) {
                throw ConfigError(origin + ": duplicate section [" + name + "]", line_number,
                                  name);
            }
            config.sections_.push_back({name, {}});
            current = &config.sections_.back();
            continue;
        }

        const auto equals = line.find('=');
        if (equals == std::string::npos) {
            throw ConfigError(origin + ": expected 'key = value'", line_number, line);
        }
        Entry entry;
        entry.key = trim(line.substr(0, equals));
        entry.value = trim(line.substr(equals + 1));
        entry.line = line_number;
        if (entry.key.empty()) {
            throw ConfigError(origin + ": empty key", line_number, line);
        }
        for (const auto& existing : current->entries) {
            if (existing.key == entry.key) {
                throw ConfigError(origin + ": duplicate key '" + entry.key + "' in section [" +
                                      current->name + "]",
                                  line_number, entry.key);
            }
        }
        current->entries.push_back(std::move(entry));
    }
    return config;
}

Section* Config::find_section(const std::string& name) {
    for (auto& section : sections_) {
        if (section.name == name) return &section;
    }
    return nullptr;
}

const Section* Config::find_section(const std::string& name) const {
    for (const auto& section : sections_) {
        if (section.name == name) return &section;
    }
    return nullptr;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const Section* s = find_section(section);
    if (!s) return false;
    return std::any_of(s->entries.begin(), s->entries.end(),
                       [&](const Entry& e) { return e.key == key; });
}

const Entry& Config::entry(const std::string& section, const std::string& key) const {
    const Section* s = find_section(section);
    if (s) {
        for (const auto& e : s->entries) {
            if (e.key == key) return e;
        }
    }
    throw ConfigError(origin_ + ": missing key '" + key + "' in section [" + section + "]", 0,
                      section + "." + key);
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    return entry(section, key).value;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

double Config::get_number(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    try {
        std::size_t consumed = 0;
        const double value = std::stod(e.value, &consumed);
        if (trim(e.value.substr(consumed)).empty()) return value;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
    }
    throw ConfigError(origin_ + ": '" + key + "' must be a plain number, got '" + e.value + "'",
                      e.line, section + "." + key);
}

double Config::get_number(const std::string& section, const std::string& key,
                          double fallback) const {
    return has(section, key) ? get_number(section, key) : fallback;
}

long Config::get_integer(const std::string& section, const std::string& key, long fallback) const {
    if (!has(section, key)) return fallback;
    const double value = get_number(section, key);
    const long rounded = std::lround(value);
    if (std::abs(value - double(rounded)) > 1e-9) {
        const Entry& e = entry(section, key);
        throw ConfigError(origin_ + ": '" + key + "' must be an integer", e.line,
                          section + "." + key);
    }
    return rounded;
}

double Config::get_angular_frequency(const std::string& section, const std::string& key,
                                     double gamma_ref) const {
    const Entry& e = entry(section, key);
    return parse_angular_frequency(e.value, gamma_ref, section + "." + key, e.line);
}

double Config::get_angular_frequency(const std::string& section, const std::string& key,
                                     double gamma_ref, double fallback) const {
    return has(section, key) ? get_angular_frequency(section, key, gamma_ref) : fallback;
}

double Config::get_time(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    return parse_time(e.value, section + "." + key, e.line);
}

double Config::get_time(const std::string& section, const std::string& key,
                        double fallback) const {
    return has(section, key) ? get_time(section, key) : fallback;
}

double Config::get_field(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    return parse_field(e.value, section + "." + key, e.line);
}

std::vector<double> Config::get_number_list(const std::string& section,
                                            const std::string& key) const {
    const Entry& e = entry(section, key);
    std::vector<double> values;
    std::stringstream ss(e.value);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        if (cell.empty()) continue;
        try {
            values.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ": '" + key + "' has a non-numeric list entry '" + cell +
                                  "'",
                              e.line, section + "." + key);
        }
    }
    if (values.empty()) {
        throw ConfigError(origin_ + ": '" + key + "' is an empty list", e.line,
                          section + "." + key);
    }
    return values;
}

std::string Config::serialize() const {
    std::ostringstream out;
    for (const auto& section : sections_) {
        if (section.name.empty() && section.entries.empty()) continue;
        if (!section.name.empty()) out << '[' << section.name << "]\n";
        for (const auto& e : section.entries) out << e.key << " = " << e.value << '\n';
    }
    return out.str();
}

bool Config::operator==(const Config& other) const {
    if (sections_.size() != other.sections_.size()) return false;
    for (std::size_t s = 0; s < sections_.size(); ++s) {
        if (sections_[s].name != other.sections_[s].name) return false;
        if (sections_[s].entries.size() != other.sections_[s].entries.size()) return false;
        for (std::size_t k = 0; k < sections_[s].entries.size(); ++k) {
            if (sections_[s].entries[k].key != other.sections_[s].entries[k].key) return false;
            if (sections_[s].entries[k].value != other.sections_[s].entries[k].value) return false;
        }
    }
    return true;
}

} // namespace eitcool::config
