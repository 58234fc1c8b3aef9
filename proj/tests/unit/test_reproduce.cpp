#include "nearcol/reproduce.hpp"

#include "nearcol/template_db.hpp"

#include <doctest.h>

#include <sstream>

using namespace nearcol;

TEST_CASE("embedded golden data parses and covers all four tables") {
  const std::string& text = reference_tables_json();
  CHECK(text.find("fmr_systems") != std::string::npos);
  CHECK(text.find("metric_bounds") != std::string::npos);
  CHECK(text.find("adaptive_ratios") != std::string::npos);
  CHECK(text.find("security_scores") != std::string::npos);
}

TEST_CASE("table1 and table3 reproduce inside their tolerances") {
  const TableReport t1 = reproduce_table1();
  for (const auto& c : t1.cells) CHECK_MESSAGE((c.skipped || c.pass), c.cell);
  const TableReport t3 = reproduce_table3();
  for (const auto& c : t3.cells) CHECK_MESSAGE(c.pass, c.cell);
}

TEST_CASE("reproduce_table rejects unknown names") {
  CHECK_THROWS_AS(reproduce_table("table9"), std::invalid_argument);
}

TEST_CASE("database file format round trip") {
  TemplateDatabase db;
  db.n = 12;
  Template a = Template::zeros(12), b = Template::zeros(12);
  a.set(0, true);   // coordinate 1: highest bit of the first byte
  a.set(11, true);  // coordinate 12
  b.set(5, true);
  db.templates = {a, b};

  std::ostringstream out;
  write_database(out, db);
  const std::string text = out.str();
  CHECK(text.substr(0, 11) == "n=12 N=2\n80");  // coord 1 = MSB of byte 0

  std::istringstream in(text);
  const TemplateDatabase back = read_database(in);
  CHECK(back.n == db.n);
  CHECK(back.templates == db.templates);
}

TEST_CASE("database parser reports line and offset") {
  {
    std::istringstream in("bogus\n");
    CHECK_THROWS_AS(read_database(in), ParseError);
  }
  {
    std::istringstream in("n=8 N=2\nff\n");
    try {
      read_database(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 3);  // second template line missing
    }
  }
  {
    std::istringstream in("n=8 N=1\nzz\n");
    try {
      read_database(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
      CHECK(e.offset == 0);
    }
  }
  {
    // padding bits beyond n must be zero
    std::istringstream in("n=4 N=1\nff\n");
    CHECK_THROWS_AS(read_database(in), ParseError);
  }
}
