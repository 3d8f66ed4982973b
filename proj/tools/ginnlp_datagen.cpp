// Writes the bundled synthetic benchmark CSVs. Run from the repo root:
//   ginnlp-datagen --out data
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ginnlp/dataset.hpp"
#include "ginnlp/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"write the bundled synthetic benchmark datasets"};
    std::string out_dir = "data";
    app.add_option("--out", out_dir, "output directory");
    CLI11_PARSE(app, argc, argv);

    std::filesystem::create_directories(out_dir);
    const auto energy = ginnlp::synthetic::building_energy();
    const auto agri = ginnlp::synthetic::agriculture();
    ginnlp::save_csv(energy, out_dir + "/building_energy.csv");
    ginnlp::save_csv(agri, out_dir + "/agriculture.csv");
    std::cout << "wrote " << out_dir << "/building_energy.csv ("
              << energy.n_rows() << " rows) and " << out_dir << "/agriculture.csv ("
              << agri.n_rows() << " rows)\n";
    return 0;
}
