#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lcdiag/instance.hpp"

namespace {

// Exit codes: 0 success, 2 input error, 3 resource cap, 4 invariant failure.
constexpr int kOk = 0, kInputError = 2, kResourceCap = 3, kInvariant = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lebesgue-class diagrams of prepared constructible functions"};
  std::string command, in_path, out_path;
  long long seed = -1;
  app.add_option("command", command,
                 "classify | diagram | rectilinearize | split | dickson | "
                 "countex | verify")
      ->required();
  app.add_option("--in", in_path, "instance JSON file")->required();
  app.add_option("--out", out_path, "report JSON file (default: stdout)");
  app.add_option("--seed", seed, "override the instance seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  std::ifstream in(in_path);
  if (!in) {
    std::cerr << "error: cannot read " << in_path << "\n";
    return kInputError;
  }
  std::ostringstream buf;
  buf << in.rdbuf();

  nlohmann::json report;
  try {
    lcdiag::Instance inst = lcdiag::parse_instance(buf.str());
    if (seed >= 0) inst.seed = unsigned(seed);
    report = lcdiag::run(command, inst);
  } catch (const lcdiag::InstanceError& e) {
    std::cerr << "input error at " << e.path << ": " << e.what() << "\n";
    return kInputError;
  } catch (const lcdiag::ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kResourceCap;
  } catch (const lcdiag::StepRejected& e) {
    std::cerr << "input not supported: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return kInvariant;
  }

  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return kInputError;
    }
    out << text;
  }
  return kOk;
}
