import sys

from cfsm.cli import main

sys.exit(main())
