from semi_hilbert_lab.errors import ConfigError

from .checker import CheckRecord, InequalityChecker, Link, Severity, \
    Verdict, check_rng, run_check


def registry():
    """
    Every registered checker, grouped by the module that implements it:
    the Schwarz family first, then the single-operator radius bounds, the
    tuple inequalities and finally the basic radius and seminorm
    comparisons.
    """
    from .fundamental import CHECKERS as fundamental
    from .radius_bounds import CHECKERS as radius_bounds
    from .schwarz import CHECKERS as schwarz
    from .tuples import CHECKERS as tuples

    return list(schwarz) + list(radius_bounds) + list(tuples) \
        + list(fundamental)


def get_checker(checker_id):
    for checker in registry():
        if checker.id == checker_id:
            return checker
    raise ConfigError("Unknown checker '%s'." % checker_id)


def select(checker_ids=None):
    """
    The checkers named by `checker_ids` in registry order, or all of them.

    :raises ConfigError: If an id is not registered.
    """
    if checker_ids is None:
        return registry()
    checkers = {checker_id: get_checker(checker_id)
                for checker_id in checker_ids}.values()
    order = {checker.id: index for index, checker in enumerate(registry())}
    return sorted(checkers, key=lambda checker: order[checker.id])


__all__ = ['CheckRecord', 'InequalityChecker', 'Link', 'Severity', 'Verdict',
           'check_rng', 'get_checker', 'registry', 'run_check', 'select']
