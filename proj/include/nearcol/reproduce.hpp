#pragma once

#include <string>
#include <vector>

namespace nearcol {

/// One compared cell of a published reference table.
struct CellCheck {
  std::string cell;      // row/column identifier within the table
  double expected = 0;   // published value
  double computed = 0;   // value after the table's display convention
  double raw = 0;        // full-precision value before display rounding
  double tolerance = 0;  // |computed - expected| allowed
  bool pass = false;
  bool skipped = false;  // cell published without a value
};

struct TableReport {
  std::string table;
  std::vector<CellCheck> cells;
  double seconds = 0;

  bool all_pass() const {
    for (const auto& c : cells)
      if (!c.skipped && !c.pass) return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t k = 0;
    for (const auto& c : cells) k += !c.skipped && !c.pass;
    return k;
  }
};

/// The embedded golden data (also checked in at data/reference_tables.json).
const std::string& reference_tables_json();

TableReport reproduce_table1();
TableReport reproduce_table2();
TableReport reproduce_table3();
TableReport reproduce_section5();

/// Dispatch by name: table1 | table2 | table3 | section5.
TableReport reproduce_table(const std::string& name);

}  // namespace nearcol
