#include <iostream>

#include <CLI11.hpp>

#include "casimir/calibration.hpp"
#include "casimir/config.hpp"
#include "casimir/force_curve.hpp"

int main(int argc, char** argv) {
    using namespace casimir;
    CLI::App app{"Synthetic frequency-shift sweep from the sphere-plane series"};
    SyntheticSweep s;
    std::string voltages = "-1.1V, -0.8V, -0.2V, 0.1V";
    std::string z_piezo = "0:650:50nm";
    std::string radius = "50um";
    std::string output;
    app.add_option("--c", s.c, "Calibration constant, m/(N s)");
    app.add_option("--z0", s.z0, "Separation at zero piezo extension, m");
    app.add_option("--residual-voltage", s.residual_voltage, "V0, volts");
    app.add_option("--voltages", voltages);
    app.add_option("--z-piezo", z_piezo);
    app.add_option("--radius", radius);
    app.add_option("--noise", s.relative_noise, "Relative Gaussian noise");
    app.add_option("--seed", s.seed);
    app.add_option("-o,--output", output);
    CLI11_PARSE(app, argc, argv);

    try {
        s.voltages = parse_quantity_list(voltages, Quantity::Voltage);
        s.z_piezo = parse_quantity_list(z_piezo, Quantity::Length);
        const auto model = ElectrostaticModel::eq3(parse_quantity(radius, Quantity::Length));
        const auto text = format_sweep_csv(synthesize_sweep(s, model));
        if (output.empty()) std::cout << text;
        else write_text(output, text);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
