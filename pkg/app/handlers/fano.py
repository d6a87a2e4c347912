from criteria import check_fano_KE
from handlers import load_input
from reports import Report, verdict_report


def fano_handler(args) -> Report:
    loaded = load_input(args.input)
    return verdict_report("check-fano", str(loaded.path), check_fano_KE(loaded.model))
