import sys

from caws_planner.cli.main import main

sys.exit(main())
