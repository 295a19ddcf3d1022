from STRIPstack.utils import settings
import argparse
import sys


def _add_problem(p, omega=True, mass=False, L=True):
    p.add_argument('--gamma', type=float, default=0.0, help="defect strength (negative: attractive)")
    p.add_argument('--p', type=float, default=3.0, help="power of the nonlinearity")
    if omega:
        p.add_argument('--omega', type=float, help="frequency")
    if mass:
        p.add_argument('--mass', type=float, help="prescribed mass")
    if L:
        p.add_argument('--L', type=float, default=1.0, help="strip width")

def _add_grid(p):
    p.add_argument('--X', type=float, help="half-length of the truncated strip")
    p.add_argument('--nx', type=int, help="x nodes (odd)")
    p.add_argument('--ny', type=int, help="y nodes")

def _add_minimize(p):
    p.add_argument('--sym', action='store_true', help="restrict to fields even in x")
    p.add_argument('--start', choices=['soliton_extension','gaussian_bump','random','file'])
    p.add_argument('--start-file', help="snapshot to start from (--start file)")
    p.add_argument('--tol', type=float, help="gradient norm tolerance")
    p.add_argument('--max-iters', type=int)
    p.add_argument('--step', type=float)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Ground states of the NLS on a strip with a line defect.")
    parser.add_argument('--config', help="run configuration file (.json or .yaml)")
    parser.add_argument('--seed', type=int, help="seed for randomized starts")
    parser.add_argument('--jobs', type=int, help="worker processes for parallel verification")
    parser.add_argument('--out-dir', help="output folder (default: a time-stamped folder under run.out_dir)")
    parser.add_argument('--verbosity', type=int, help="0 silent, 1 summaries, 2 per iteration")
    parser.add_argument('--set', action='append', default=[], metavar='KEY=VALUE', help="override a numeric setting")
    sub = parser.add_subparsers(dest='command')

    p = sub.add_parser('soliton1d', help="table of 1D soliton mass and energy")
    _add_problem(p, omega=False, L=False)
    p.add_argument('--omega', type=float, nargs='+', default=[1.0])
    p.add_argument('--out', help="CSV table name")

    p = sub.add_parser('minimize', help="action or energy minimization")
    p.add_argument('subcommand', choices=['action','energy'])
    _add_problem(p, mass=True)
    _add_grid(p)
    _add_minimize(p)
    p.add_argument('--out', help="snapshot name")
    p.add_argument('--log', help="CSV iteration log name")

    p = sub.add_parser('greens', help="Green's function slices")
    p.add_argument('subcommand', choices=['slice'])
    _add_problem(p)
    p.add_argument('--xi', type=float, default=0.5)
    p.add_argument('--eta', type=float, default=0.25)
    p.add_argument('--y', type=float)
    p.add_argument('--x-min', type=float, default=-5.0)
    p.add_argument('--x-max', type=float, default=5.0)
    p.add_argument('--n', type=int, default=201)
    p.add_argument('--k-max', type=int)
    p.add_argument('--even-modes-only', action='store_true')
    p.add_argument('--out', help="CSV slice name")

    p = sub.add_parser('shrink', help="experiments over the strip width")
    p.add_argument('subcommand', choices=['sweep','lstar','lstarstar','gammastar'])
    _add_problem(p, mass=True)
    _add_grid(p)
    _add_minimize(p)
    p.add_argument('--mass-per-length', type=float, help="normalized mass of the sweep")
    p.add_argument('--L-min', type=float)
    p.add_argument('--L-max', type=float)
    p.add_argument('--n-L', type=int)
    p.add_argument('--verify-cold', action='store_true')
    p.add_argument('--no-refine', action='store_true')
    p.add_argument('--optimize-f', action='store_true')
    p.add_argument('--snapshot', help="gamma=0 action minimizer for gammastar")
    p.add_argument('--existence-check', action='store_true')
    p.add_argument('--out', help="CSV sweep name")

    p = sub.add_parser('verify', help="diagnostics of a stored field")
    _add_problem(p, mass=True)
    p.add_argument('snapshot')
    return parser


def config_from_args(args) -> dict:
    """Builds a run configuration document from the subcommand flags."""
    cmd = args.command
    doc = {'command':cmd, 'problem':{'p':args.p,'gamma':args.gamma}}
    prob = doc['problem']
    if getattr(args,'L',None) is not None:
        prob['L'] = args.L
    if cmd != 'soliton1d' and getattr(args,'omega',None) is not None:
        prob['omega'] = args.omega
    if getattr(args,'mass',None) is not None:
        prob['m'] = args.mass
    if hasattr(args,'subcommand'):
        doc['subcommand'] = args.subcommand
    if hasattr(args,'nx'):
        doc['grid'] = {k:v for k,v in [('nx',args.nx),('ny',args.ny),('x_extent',args.X)] if v is not None}
    if hasattr(args,'sym'):
        m = {'symmetric_x':args.sym}
        for key,val in [('start',args.start),('start_file',args.start_file),('tol_grad',args.tol),
                        ('max_iters',args.max_iters),('step',args.step)]:
            if val is not None:
                m[key] = val
        if cmd == 'minimize':
            m['mode'] = 'mass_energy' if args.subcommand == 'energy' else 'nehari_action'
        doc['minimize'] = m
    outputs = {}
    if cmd == 'soliton1d':
        doc['soliton1d'] = {'omegas':args.omega}
        if args.out: outputs['table'] = args.out
    elif cmd == 'minimize':
        if args.out: outputs['snapshot'] = args.out
        if args.log: outputs['log'] = args.log
    elif cmd == 'greens':
        doc['greens'] = {'xi':args.xi,'eta':args.eta,'y':args.y,'x_min':args.x_min,'x_max':args.x_max,
                         'n':args.n,'k_max':args.k_max,'even_modes_only':args.even_modes_only}
        if args.out: outputs['greens'] = args.out
    elif cmd == 'shrink':
        if args.mass_per_length is not None:
            prob['m'] = args.mass_per_length
        s = {'verify_cold':args.verify_cold,'refine':not args.no_refine,'optimize_f':args.optimize_f,
             'existence_check':args.existence_check,'snapshot':args.snapshot}
        if args.L_min is not None or args.L_max is not None or args.n_L is not None:
            import numpy as np
            if args.L_min is None or args.L_max is None or args.n_L is None:
                raise SystemExit("--L-min, --L-max and --n-L go together")
            s['lengths'] = [float(v) for v in np.geomspace(args.L_max,args.L_min,args.n_L)]
        doc['shrink'] = s
        if args.out: outputs['sweep'] = args.out
    elif cmd == 'verify':
        doc['verify'] = {'snapshot':args.snapshot}
    if outputs:
        doc['outputs'] = outputs
    return doc


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    settings.apply_overrides(args.set)
    if args.verbosity is not None:
        settings.set('run.verbosity',args.verbosity)

    from STRIPstack.execution import entrypoint
    from STRIPstack.utils.errors import StripError
    try:
        if args.config is not None:
            cfg = entrypoint.load_run_config(args.config)
        elif args.command is not None:
            cfg = entrypoint.from_document(config_from_args(args))
        else:
            parser.print_help()
            return 1
        if args.seed is not None:
            cfg.seed = args.seed
        if args.jobs is not None:
            cfg.jobs = args.jobs
        if args.out_dir is not None:
            cfg.outputs.out_dir = args.out_dir
        cfg.validate()
    except StripError as e:
        import json
        print(json.dumps(e.to_record(),sort_keys=True))
        return 1
    report = entrypoint.run(cfg)
    return report['exit_code']


if __name__=='__main__':
    sys.exit(main())
