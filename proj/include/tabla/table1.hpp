#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabla/stats.hpp"

namespace tabla {

/// One cell of the per-band harmonic summary: standard deviation and mean
/// frequency of the harmonics of one tabla in one sub-band.
struct Table1Cell {
    int tabla_id;     // 1..5
    int subband;      // 1..5, low to high (110-220 ... 1760-3520)
    double f_low, f_high;
    double stdev;
    double mean;
};

/// The bundled per-band summary table (23 cells; tablas 4 and 5 have no
/// 110-220 entry). Also shipped as data/table1.csv.
inline const std::vector<Table1Cell>& table1_data() {
    static const std::vector<Table1Cell> cells = {
        {1, 1, 110, 220, 24.341, 178.732},   {1, 2, 220, 440, 36.927, 302.998},
        {1, 3, 440, 880, 124.346, 640.864},  {1, 4, 880, 1760, 195.905, 1181.595},
        {1, 5, 1760, 3520, 242.300, 2170.102},
        {2, 1, 110, 220, 31.433, 178.149},   {2, 2, 220, 440, 61.536, 315.576},
        {2, 3, 440, 880, 45.133, 558.249},   {2, 4, 880, 1760, 236.912, 1130.017},
        {2, 5, 1760, 3520, 245.908, 1996.191},
        {3, 1, 110, 220, 27.200, 178.310},   {3, 2, 220, 440, 23.820, 321.220},
        {3, 3, 440, 880, 139.530, 565.568},  {3, 4, 880, 1760, 253.916, 1307.372},
        {3, 5, 1760, 3520, 393.874, 2228.098},
        {4, 2, 220, 440, 24.889, 306.703},   {4, 3, 440, 880, 111.122, 552.938},
        {4, 4, 880, 1760, 165.671, 1043.175},{4, 5, 1760, 3520, 261.962, 2217.92},
        {5, 2, 220, 440, 40.109, 288.843},   {5, 3, 440, 880, 159.109, 580.582},
        {5, 4, 880, 1760, 309.175, 1258.977},{5, 5, 1760, 3520, 324.960, 1991.757},
    };
    return cells;
}

enum class Table1Measure { cv, mean, sd };

inline Table1Measure parse_measure(const std::string& s) {
    if (s == "cv") return Table1Measure::cv;
    if (s == "mean") return Table1Measure::mean;
    if (s == "sd") return Table1Measure::sd;
    throw std::invalid_argument("measure must be cv, mean or sd");
}

inline double table1_value(const Table1Cell& c, Table1Measure m) {
    switch (m) {
        case Table1Measure::cv: return coefficient_of_variation(c.stdev, c.mean);
        case Table1Measure::mean: return c.mean;
        case Table1Measure::sd: return c.stdev;
    }
    throw std::logic_error("unreachable");
}

/// Group the table's cells by sub-band (labels "1".."5").
inline GroupedSamples table1_by_subband(Table1Measure m,
                                        const std::vector<Table1Cell>& cells = table1_data()) {
    GroupedSamples g;
    for (int b = 1; b <= 5; ++b) {
        GroupedSamples::Group grp;
        grp.label = std::to_string(b);
        for (const auto& c : cells)
            if (c.subband == b) grp.values.push_back(table1_value(c, m));
        if (!grp.values.empty()) g.groups.push_back(std::move(grp));
    }
    return g;
}

/// Group the table's cells by tabla (labels "1".."5").
inline GroupedSamples table1_by_tabla(Table1Measure m,
                                      const std::vector<Table1Cell>& cells = table1_data()) {
    GroupedSamples g;
    for (int t = 1; t <= 5; ++t) {
        GroupedSamples::Group grp;
        grp.label = std::to_string(t);
        for (const auto& c : cells)
            if (c.tabla_id == t) grp.values.push_back(table1_value(c, m));
        if (!grp.values.empty()) g.groups.push_back(std::move(grp));
    }
    return g;
}

/// CSV columns: tabla_id,subband,f_low,f_high,stdev,mean (header row).
inline std::vector<Table1Cell> load_table1_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<Table1Cell> cells;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) { first = false; continue; }
        std::stringstream ss(line);
        std::string tok;
        Table1Cell c{};
        auto next = [&]() {
            if (!std::getline(ss, tok, ',')) throw std::runtime_error("malformed table row: " + line);
            return tok;
        };
        c.tabla_id = std::stoi(next());
        c.subband = std::stoi(next());
        c.f_low = std::stod(next());
        c.f_high = std::stod(next());
        c.stdev = std::stod(next());
        c.mean = std::stod(next());
        cells.push_back(c);
    }
    return cells;
}

inline void write_table1_csv(const std::vector<Table1Cell>& cells, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "tabla_id,subband,f_low,f_high,stdev,mean\n";
    out.precision(10);
    for (const auto& c : cells)
        out << c.tabla_id << ',' << c.subband << ',' << c.f_low << ',' << c.f_high << ','
            << c.stdev << ',' << c.mean << '\n';
}

}  // namespace tabla
