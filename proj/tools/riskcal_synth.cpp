// Writes a synthetic survey CSV with the shape of the reference study.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "riskcal/survey_data.hpp"
#include "riskcal/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a synthetic 69-respondent survey file"};
    std::uint64_t seed = 1;
    std::string out;
    app.add_option("--seed", seed, "generator seed");
    app.add_option("-o,--out", out, "output file; default stdout");
    CLI11_PARSE(app, argc, argv);

    const auto csv = riskcal::serialize_survey(riskcal::reference_dataset(seed));
    if (out.empty()) {
        std::cout << csv;
        return 0;
    }
    std::ofstream f(out, std::ios::binary);
    f << csv;
    if (!f) {
        std::cerr << "error: cannot write " << out << "\n";
        return 3;
    }
    return 0;
}
