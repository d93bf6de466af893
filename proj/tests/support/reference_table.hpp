#pragma once

#include <array>
#include <string>

namespace reference {

// Published propensity results: no-context value, then (value, printed
// improvement in percent) at 10, 20, 50 and 100 percent of the variables.
struct Cell {
  double value;
  double printed_pct;
};

struct Row {
  std::string product;
  std::string measure;
  double base;
  std::array<Cell, 4> cells;
};

inline const std::array<Row, 8>& improvements() {
  static const std::array<Row, 8> rows{{
      {"business_account", "F1", 0.57, {{{0.634, 11.1}, {0.645, 13.2}, {0.681, 19.4}, {0.71, 24.5}}}},
      {"business_account", "AUC", 0.78, {{{0.832, 6.68}, {0.844, 8.18}, {0.881, 13.0}, {0.901, 15.5}}}},
      {"acquiring", "F1", 0.535, {{{0.557, 4.14}, {0.562, 4.92}, {0.655, 22.3}, {0.714, 33.5}}}},
      {"acquiring", "AUC", 0.763, {{{0.792, 3.9}, {0.799, 4.74}, {0.863, 13.2}, {0.905, 18.7}}}},
      {"salary", "F1", 0.65, {{{0.662, 1.8}, {0.672, 3.33}, {0.71, 9.29}, {0.744, 14.5}}}},
      {"salary", "AUC", 0.711, {{{0.744, 4.68}, {0.757, 6.41}, {0.826, 16.2}, {0.853, 20.0}}}},
      {"leasing", "F1", 0.483, {{{0.494, 2.31}, {0.493, 2.1}, {0.529, 9.56}, {0.571, 18.2}}}},
      {"leasing", "AUC", 0.757, {{{0.762, 0.697}, {0.764, 0.952}, {0.815, 7.66}, {0.851, 12.4}}}},
  }};
  return rows;
}

}  // namespace reference
