// config.hpp — INI-style scenario files with explicit units on every physical
// quantity ("2.552 MHz", "3.4 Gamma", "500 us", "416 uT"). Frequencies given
// in Hz-family units are ordinary frequencies and are converted to angular
// rad/s on parse; "rad/s" passes through; "Gamma" scales the scheme linewidth.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "eitcool/errors.hpp"

namespace eitcool::config {

struct Entry {
    std::string key;
    std::string value;
    int line{0};
};

struct Section {
    std::string name;
    std::vector<Entry> entries;
};

class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text, const std::string& origin = "<config>");

    bool has(const std::string& section, const std::string& key) const;
    const Entry& entry(const std::string& section, const std::string& key) const; // throws

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;

    double get_number(const std::string& section, const std::string& key) const;
    double get_number(const std::string& section, const std::string& key, double fallback) const;
    long get_integer(const std::string& section, const std::string& key, long fallback) const;

    // Unit-tagged quantities. gamma_ref backs the "Gamma" unit; passing 0
    // makes "Gamma" an error.
    double get_angular_frequency(const std::string& section, const std::string& key,
                                 double gamma_ref = 0.0) const;
    double get_angular_frequency(const std::string& section, const std::string& key,
                                 double gamma_ref, double fallback) const;
    double get_time(const std::string& section, const std::string& key) const;
    double get_time(const std::string& section, const std::string& key, double fallback) const;
    double get_field(const std::string& section, const std::string& key) const;

    std::vector<double> get_number_list(const std::string& section, const std::string& key) const;

    const std::vector<Section>& sections() const { return sections_; }

    // Canonical text form; parse(serialize(parse(x))) == parse(x).
    std::string serialize() const;

    bool operator==(const Config& other) const;

private:
    std::vector<Section> sections_;
    std::string origin_;

    Section* find_section(const std::string& name);
    const Section* find_section(const std::string& name) const;
};

// Scalar quantity parsers, exposed for reuse by sweep handling.
double parse_angular_frequency(const std::string& text, double gamma_ref,
                               const std::string& context, int line);
double parse_time(const std::string& text, const std::string& context, int line);
double parse_field(const std::string& text, const std::string& context, int line);

} // namespace eitcool::config
