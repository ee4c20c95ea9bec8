// bookflow: replay an ITCH 4.1 capture (or a synthetic stream) for one
// symbol and print one CSV row of raw order-book attributes per book
// modification.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bookflow/itch_encode.hpp"
#include "bookflow/pipeline.hpp"
#include "bookflow/synth.hpp"

namespace {

struct OutputTarget {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    bool open(const std::string& path) {
        if (path.empty() || path == "-") return true;
        file.open(path, std::ios::trunc);
        if (!file) return false;
        stream = &file;
        return true;
    }
};

void add_attribute_flags(CLI::App* cmd, bookflow::RunConfig& cfg) {
    cmd->add_option("--tau", cfg.tau_s, "flow estimator time scale, seconds")
        ->capture_default_str();
    cmd->add_option("--n-basis", cfg.n_basis, "flow estimator basis size (2..12)")
        ->capture_default_str();
    cmd->add_option("--cutoff", cfg.cutoff_dollars,
                    "edge measure cutoff, dollars from best price")
        ->capture_default_str();
    cmd->add_option("--radau-nodes", cfg.radau_nodes, "edge quadrature nodes")
        ->capture_default_str();
    cmd->add_option("--window", cfg.sliding_window_s, "sliding-window baseline, seconds")
        ->capture_default_str();
    cmd->add_option("--from", cfg.from_hours, "emit rows from this decimal hour");
    cmd->add_option("--to", cfg.to_hours, "emit rows before this decimal hour");
    cmd->add_option("--edge-every-n", cfg.edge_every_n,
                    "recompute edge quadrature every n-th row; rows in between "
                    "repeat the last values")
        ->capture_default_str();
}

int run_dump(const bookflow::RunConfig& cfg, const std::string& out_path) {
    OutputTarget out;
    if (!out.open(out_path)) {
        std::cerr << "cannot open output file: " << out_path << '\n';
        return 1;
    }
    try {
        auto result = bookflow::dump_capture(cfg, *out.stream);
        out.stream->flush();
        bookflow::print_summary(std::cerr, result, cfg);
        if (result.rows_emitted == 0)
            std::cerr << "warning: no rows emitted (symbol absent or range empty)\n";
        return 0;
    } catch (const bookflow::itch::DecodeError& e) {
        std::cerr << "capture decode failed: " << e.what() << '\n';
        return 2;
    } catch (const bookflow::BookError& e) {
        std::cerr << "book corrupted: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

struct SimulateArgs {
    double lambda0 = 2.0;
    std::vector<std::string> spike_specs;
    double horizon_s = 1800;
    std::uint64_t seed = 1;
    std::string size_spec = "geometric:150";
    int depth = 40;
    double passive_rate = 8.0;
    std::string emit_itch;
};

bool parse_spikes(const std::vector<std::string>& specs, bookflow::synth::SpikeProcess& proc) {
    for (const auto& s : specs) {
        bookflow::synth::Spike spike;
        if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &spike.onset_s, &spike.amplitude,
                        &spike.relax_s) != 3 ||
            spike.relax_s <= 0 || spike.amplitude < 0)
            return false;
        proc.spikes.push_back(spike);
    }
    return true;
}

bool parse_size(const std::string& spec, bookflow::synth::SizeDist& dist) {
    double v = 0;
    if (std::sscanf(spec.c_str(), "fixed:%lf", &v) == 1)
        dist = {bookflow::synth::SizeDist::Kind::Fixed, v};
    else if (std::sscanf(spec.c_str(), "geometric:%lf", &v) == 1)
        dist = {bookflow::synth::SizeDist::Kind::Geometric, v};
    else
        return false;
    return v >= 1;
}

int run_simulate(bookflow::RunConfig cfg, const SimulateArgs& args,
                 const std::string& out_path) {
    bookflow::synth::SpikeProcess proc;
    proc.lambda0 = args.lambda0;
    if (!parse_spikes(args.spike_specs, proc)) {
        std::cerr << "bad --spike (want onset:amplitude:relax_s)\n";
        return 1;
    }
    if (!parse_size(args.size_spec, proc.size_dist)) {
        std::cerr << "bad --size (want fixed:N or geometric:MEAN)\n";
        return 1;
    }

    bookflow::synth::BookSimParams params;
    params.symbol = cfg.symbol;
    params.initial_depth = args.depth;
    params.target_depth = args.depth;
    params.passive_rate = args.passive_rate;

    const auto events = bookflow::synth::gen_itch(proc, params, args.horizon_s, args.seed);
    if (!args.emit_itch.empty()) bookflow::itch::write_capture(args.emit_itch, events);

    OutputTarget out;
    if (!out.open(out_path)) {
        std::cerr << "cannot open output file: " << out_path << '\n';
        return 1;
    }
    auto result = bookflow::dump_events(events, cfg, out.stream);
    out.stream->flush();
    bookflow::print_summary(std::cerr, result, cfg);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Limit-order-book attribute dumper for ITCH 4.1 captures"};
    app.require_subcommand(1);

    bookflow::RunConfig dump_cfg;
    std::string dump_out;
    auto* dump = app.add_subcommand(
        "dump", "replay a gzip ITCH 4.1 capture for one symbol, CSV to stdout");
    dump->add_option("input", dump_cfg.input_path, "capture file (gzip or plain)")
        ->required();
    dump->add_option("symbol", dump_cfg.symbol, "stock symbol, e.g. AAPL")->required();
    add_attribute_flags(dump, dump_cfg);
    dump->add_option("-o,--output", dump_out, "output CSV path (default stdout)");

    bookflow::RunConfig sim_cfg;
    sim_cfg.symbol = "SYNTH";
    SimulateArgs sim_args;
    std::string sim_out;
    auto* sim = app.add_subcommand(
        "simulate", "generate a synthetic spiky order flow and dump the same CSV");
    sim->add_option("--lambda0", sim_args.lambda0, "base trade rate, trades/s")
        ->capture_default_str();
    sim->add_option("--spike", sim_args.spike_specs,
                    "excitation spike onset:amplitude:relax_s (repeatable)");
    sim->add_option("--horizon", sim_args.horizon_s, "simulated seconds")
        ->capture_default_str();
    sim->add_option("--seed", sim_args.seed, "random seed")->capture_default_str();
    sim->add_option("--size", sim_args.size_spec, "trade size: fixed:N or geometric:MEAN")
        ->capture_default_str();
    sim->add_option("--depth", sim_args.depth, "target resting orders per side")
        ->capture_default_str();
    sim->add_option("--passive-rate", sim_args.passive_rate,
                    "book add/cancel/replace events per second")
        ->capture_default_str();
    sim->add_option("--symbol", sim_cfg.symbol, "synthetic symbol name")
        ->capture_default_str();
    sim->add_option("--emit-itch", sim_args.emit_itch,
                    "also write the generated stream as a gzip ITCH capture");
    add_attribute_flags(sim, sim_cfg);
    sim->add_option("-o,--output", sim_out, "output CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (dump->parsed()) return run_dump(dump_cfg, dump_out);
    return run_simulate(sim_cfg, sim_args, sim_out);
}
