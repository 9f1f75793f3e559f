#pragma once

// Experiment configuration (JSON) and report serialization (CSV, Markdown).

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "asianqmc/engine.hpp"

namespace asianqmc {

// S0 = 100, sigma = 0.2, r = 0.1, T = 1, H = 120, K in {90, 100, 110},
// d in {64, 128}, M = 500, N = 2^15, GPCA, all three options and Greeks and
// the four methods.
ExperimentConfig default_config();

// Throws ConfigError with a "line N:" prefix pointing into `text`.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

// Columns: option,greek,K,d,method,mean,std_err,vrf,seconds,status. Floats
// are written with 17 significant digits so the file reads back exactly.
void write_csv(const ExperimentReport& report, std::ostream& out);
ExperimentReport read_csv(std::istream& in);

// One table per option in the layout greek | K | d | method columns, holding
// "mean (VRF)" with 6 significant digits.
void write_markdown(const ExperimentReport& report, std::ostream& out);

std::string format_significant(double value, int digits);

}  // namespace asianqmc
